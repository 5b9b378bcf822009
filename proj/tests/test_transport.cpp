#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "cclab/transport.hpp"

using namespace cclab;

namespace {

// Independent oracle for measures on the line: with a convex cost of the
// displacement, the quantile (monotone) coupling is optimal. Two-pointer
// sweep over atoms sorted by position.
double monotone_cost(std::vector<double> x, std::vector<double> a,
                     std::vector<double> y, std::vector<double> b, double p) {
  std::vector<int> ix(x.size()), iy(y.size());
  std::iota(ix.begin(), ix.end(), 0);
  std::iota(iy.begin(), iy.end(), 0);
  std::sort(ix.begin(), ix.end(), [&](int u, int v) { return x[u] < x[v]; });
  std::sort(iy.begin(), iy.end(), [&](int u, int v) { return y[u] < y[v]; });
  double cost = 0.0;
  std::size_t i = 0, j = 0;
  double ra = a[ix[0]], rb = b[iy[0]];
  while (i < ix.size() && j < iy.size()) {
    double t = std::min(ra, rb);
    cost += t * std::pow(std::fabs(x[ix[i]] - y[iy[j]]), p);
    ra -= t;
    rb -= t;
    if (ra <= 1e-15) {
      ++i;
      if (i < ix.size()) ra = a[ix[i]];
    }
    if (rb <= 1e-15) {
      ++j;
      if (j < iy.size()) rb = b[iy[j]];
    }
  }
  return cost;
}

void check_marginals(const TransportPlan& plan, const std::vector<double>& a,
                     const std::vector<double>& b, double tol) {
  std::vector<double> row(a.size(), 0.0), col(b.size(), 0.0);
  for (std::size_t k = 0; k < plan.size(); ++k) {
    row[plan.from[k]] += plan.flow[k];
    col[plan.to[k]] += plan.flow[k];
  }
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err += std::fabs(row[i] - a[i]);
  for (std::size_t j = 0; j < b.size(); ++j) err += std::fabs(col[j] - b[j]);
  CHECK(err < tol);
}

}  // namespace

TEST_CASE("exact solver matches the monotone oracle on the line") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> upos(-3.0, 3.0), uw(0.2, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    int m = 25, n = 31;
    std::vector<double> x(m), y(n), a(m), b(n);
    for (auto& v : x) v = upos(rng);
    for (auto& v : y) v = upos(rng);
    double sa = 0.0, sb = 0.0;
    for (auto& v : a) sa += (v = uw(rng));
    for (auto& v : b) sb += (v = uw(rng));
    for (auto& v : a) v /= sa;
    for (auto& v : b) v /= sb;
    for (double p : {2.0, 1.0}) {
      std::vector<double> cost(m * n);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
          cost[i * n + j] = std::pow(std::fabs(x[i] - y[j]), p);
        }
      }
      auto plan = min_cost_plan(a, b, cost, m, n);
      double oracle = monotone_cost(x, a, y, b, p);
      CHECK(plan.cost == doctest::Approx(oracle).epsilon(1e-9));
      check_marginals(plan, a, b, 1e-12);
    }
  }
}

TEST_CASE("exact solver matches brute force") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uc(0.0, 5.0);

  // 2x2: the feasible set is an interval in the (1,1) flow, cost is linear,
  // so the optimum sits at an endpoint.
  for (int trial = 0; trial < 20; ++trial) {
    double a1 = 0.3 + 0.4 * (trial % 5) / 5.0;
    std::vector<double> a = {a1, 1.0 - a1}, b = {0.45, 0.55};
    std::vector<double> c = {uc(rng), uc(rng), uc(rng), uc(rng)};
    double tlo = std::max(0.0, a[0] - b[1]), thi = std::min(a[0], b[0]);
    auto cost_at = [&](double t) {
      return c[0] * t + c[1] * (a[0] - t) + c[2] * (b[0] - t) +
             c[3] * (b[1] - a[0] + t);
    };
    double best = std::min(cost_at(tlo), cost_at(thi));
    auto plan = min_cost_plan(a, b, c, 2, 2);
    CHECK(plan.cost == doctest::Approx(best).epsilon(1e-12));
  }

  // n x n with uniform weights: the optimum is attained at a permutation.
  for (int trial = 0; trial < 8; ++trial) {
    int n = 5;
    std::vector<double> w(n, 1.0 / n), cost(n * n);
    for (auto& v : cost) v = uc(rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += cost[i * n + perm[i]] / n;
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    auto plan = min_cost_plan(w, w, cost, n, n);
    CHECK(plan.cost == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("entropic plan lands near the exact optimum with clean marginals") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> uc(0.1, 4.0), uw(0.2, 1.0);
  int m = 20, n = 25;
  std::vector<double> a(m), b(n), cost(m * n);
  double sa = 0.0, sb = 0.0;
  for (auto& v : a) sa += (v = uw(rng));
  for (auto& v : b) sb += (v = uw(rng));
  for (auto& v : a) v /= sa;
  for (auto& v : b) v /= sb;
  for (auto& v : cost) v = uc(rng);
  auto exact = min_cost_plan(a, b, cost, m, n);
  auto soft = entropic_plan(a, b, cost, m, n);
  CHECK(soft.cost >= exact.cost - 1e-10);
  CHECK(soft.cost <= exact.cost * 1.05 + 1e-10);
  check_marginals(soft, a, b, 1e-9);
}

TEST_CASE("dual ascent reaches the primal value from below") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> uc(0.1, 4.0);
  int m = 15, n = 18;
  std::vector<double> a(m, 1.0 / m), b(n, 1.0 / n), cost(m * n);
  for (auto& v : cost) v = uc(rng);
  auto exact = min_cost_plan(a, b, cost, m, n);
  std::vector<double> psi, phi;
  double dual = kantorovich_ascent(a, b, cost, m, n, 64, &psi, &phi);
  CHECK(dual <= exact.cost + 1e-9);
  CHECK(dual >= exact.cost * 0.95 - 1e-9);
  // Feasibility of the returned potentials.
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      CHECK(psi[i] + phi[j] <= cost[i * n + j] + 1e-10);
    }
  }
  CHECK(kantorovich_dual_value(a, b, psi, phi) == doctest::Approx(dual));
}

TEST_CASE("w2 between point clouds") {
  auto h1 = GroupModel::heisenberg1();
  Point o = identity(h1);
  Point g = {0.7, -0.4, 0.3};
  auto mu = make_cloud(h1, {o}, {1.0});
  auto nu = make_cloud(h1, {g}, {1.0});
  double d = cc_distance(h1, o, g);
  CHECK(w2_distance(mu, nu) == doctest::Approx(d).epsilon(1e-12));
  CHECK(w2_distance(mu, mu) == doctest::Approx(0.0));

  // Right translation moves every atom a fixed cc-distance, so the diagonal
  // coupling costs exactly d(o, u); left invariance makes it optimal here.
  Point u = {0.2, 0.1, -0.05};
  std::vector<Point> base = {{0.0, 0.0, 0.0}, {0.5, 0.2, 0.1}, {-0.3, 0.4, 0.0}};
  std::vector<Point> moved;
  for (const auto& p : base) moved.push_back(multiply(h1, p, u));
  auto spread = make_cloud(h1, base, {0.5, 0.3, 0.2});
  auto shifted = make_cloud(h1, moved, {0.5, 0.3, 0.2});
  double du = cc_distance(h1, o, u);
  double w = w2_distance(spread, shifted);
  CHECK(w <= du * (1.0 + 1e-9));
  CHECK(w >= 0.5 * du);

  auto line = GroupModel::abelian_box(1);
  auto m2 = make_cloud(line, {{0.0}, {1.0}}, {0.5, 0.5});
  auto n2 = make_cloud(line, {{0.2}, {1.2}}, {0.5, 0.5});
  CHECK(w2_distance(m2, n2) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("w2 metric axioms on random clouds") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> up(-1.0, 1.0), uw(0.2, 1.0);
  auto h1 = GroupModel::heisenberg1();
  auto rnd_cloud = [&](int k) {
    std::vector<Point> pts;
    std::vector<double> wts;
    for (int i = 0; i < k; ++i) {
      pts.push_back({up(rng), up(rng), 0.5 * up(rng)});
      wts.push_back(uw(rng));
    }
    return make_cloud(h1, pts, wts);
  };
  auto A = rnd_cloud(6), B = rnd_cloud(7), C = rnd_cloud(5);
  double ab = w2_distance(A, B), ba = w2_distance(B, A);
  double bc = w2_distance(B, C), ac = w2_distance(A, C);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
  CHECK(ac <= ab + bc + 1e-9);
  CHECK(w1_distance(A, B) <= ab + 1e-9);  // Cauchy-Schwarz on the coupling
}

TEST_CASE("grid aggregation and translated gaussians") {
  auto line = GroupModel::abelian_box(1);
  auto chart = make_chart(line, {-6.0}, {6.0}, {96}, Boundary::Reflecting);
  double h = chart.spacing[0];
  double shift = 8.0 * h;
  auto g0 = sample_density(chart, [&](const Point& p) {
    return std::exp(-0.5 * p[0] * p[0]);
  });
  auto g1 = sample_density(chart, [&](const Point& p) {
    return std::exp(-0.5 * (p[0] - shift) * (p[0] - shift));
  });
  // Exact lattice translates: cell-to-cell transport by `shift` is optimal.
  CHECK(w2_distance(g0, g1) == doctest::Approx(shift).epsilon(1e-6));

  auto cloud = grid_to_cloud(g0);
  CHECK(cloud.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cloud.size() <= 96);

  auto box = GroupModel::abelian_box(2);
  auto chart2 = make_chart(box, {0.0, 0.0}, {1.0, 1.0}, {96, 96},
                           Boundary::Reflecting);
  auto uni = sample_density(chart2, [](const Point&) { return 1.0; });
  TransportOptions opt;
  auto agg = grid_to_cloud(uni, opt);
  CHECK(static_cast<int>(agg.size()) <= opt.atom_budget);
  CHECK(agg.mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& p : agg.points) {
    CHECK(p[0] > 0.0);
    CHECK(p[0] < 1.0);
  }
}

TEST_CASE("plans above the lp cap fall back to the entropic path") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> up(-1.0, 1.0);
  auto line = GroupModel::abelian_box(1);
  std::vector<Point> xs, ys;
  for (int i = 0; i < 20; ++i) xs.push_back({up(rng)});
  for (int i = 0; i < 20; ++i) ys.push_back({up(rng)});
  auto mu = make_cloud(line, xs, std::vector<double>(20, 1.0));
  auto nu = make_cloud(line, ys, std::vector<double>(20, 1.0));
  auto exact = w2_plan(mu, nu);
  TransportOptions small;
  small.lp_cap = 10;
  auto soft = w2_plan(mu, nu, small);
  CHECK(exact.exact);
  CHECK_FALSE(soft.exact);
  CHECK(soft.cost2 >= exact.cost2 - 1e-10);
  CHECK(soft.cost2 <= exact.cost2 * 1.05 + 1e-6);
}

TEST_CASE("hopf lax envelope on a two point support") {
  auto line = GroupModel::abelian_box(1);
  std::vector<Point> supp = {{0.0}, {1.0}};
  std::vector<double> phi = {0.0, 10.0};
  double s = 0.4;
  for (double x : {-0.5, 0.3, 0.9, 2.0}) {
    double expect = std::min(x * x / (2.0 * s),
                             10.0 + (x - 1.0) * (x - 1.0) / (2.0 * s));
    CHECK(hopf_lax(line, supp, phi, {x}, s) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hopf_lax(line, supp, phi, {0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("displacement interpolation walks the geodesic") {
  auto h1 = GroupModel::heisenberg1();
  Point o = identity(h1);
  Point g = {0.6, 0.1, 0.2};
  auto cp = w2_plan(make_cloud(h1, {o}, {1.0}), make_cloud(h1, {g}, {1.0}));
  double d = cc_distance(h1, o, g);
  auto mid = displacement_interpolate(cp, 0.5);
  REQUIRE(mid.size() == 1);
  CHECK(cc_distance(h1, o, mid.points[0]) == doctest::Approx(0.5 * d).epsilon(1e-8));
  CHECK(cc_distance(h1, mid.points[0], g) == doctest::Approx(0.5 * d).epsilon(1e-8));
  auto start = displacement_interpolate(cp, 0.0);
  auto finish = displacement_interpolate(cp, 1.0);
  CHECK(cc_distance(h1, start.points[0], o) == doctest::Approx(0.0));
  CHECK(cc_distance(h1, finish.points[0], g) == doctest::Approx(0.0));

  auto line = GroupModel::abelian_box(1);
  auto cpl = w2_plan(make_cloud(line, {{0.0}, {1.0}}, {0.5, 0.5}),
                     make_cloud(line, {{2.0}, {3.0}}, {0.5, 0.5}));
  auto quarter = displacement_interpolate(cpl, 0.25);
  CHECK(quarter.size() == 2);
}

TEST_CASE("ball convolution spreads mass uniformly") {
  auto line = GroupModel::abelian_box(1);
  auto chart = make_chart(line, {-1.0}, {1.0}, {64}, Boundary::Reflecting);
  auto mu = make_cloud(line, {{0.0}}, {1.0});
  auto rho = convolve_measure(mu, chart, 0.5);
  CHECK(rho.mass() == doctest::Approx(1.0).epsilon(1e-12));
  double peak = *std::max_element(rho.values.begin(), rho.values.end());
  for (std::size_t c = 0; c < rho.values.size(); ++c) {
    double x = rho.chart.node(static_cast<long long>(c))[0];
    if (std::fabs(x) < 0.45) CHECK(rho.values[c] == doctest::Approx(peak));
    if (std::fabs(x) > 0.55) CHECK(rho.values[c] == doctest::Approx(0.0));
  }

  auto h1 = GroupModel::heisenberg1();
  auto chart3 = make_chart(h1, {-1.0, -1.0, -0.5}, {1.0, 1.0, 0.5},
                           {24, 24, 24}, Boundary::Reflecting);
  Point site = {0.2, -0.1, 0.05};
  auto rho3 = convolve_measure(make_cloud(h1, {site}, {1.0}), chart3, 0.4);
  CHECK(rho3.mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t c = 0; c < rho3.values.size(); ++c) {
    if (rho3.values[c] > 0.0) {
      Point q = rho3.chart.node(static_cast<long long>(c));
      CHECK(cc_distance(h1, site, q) <= 0.4 + 1e-12);
    }
  }
}

TEST_CASE("curve regularization is stable on constant curves") {
  auto line = GroupModel::abelian_box(1);
  auto chart = make_chart(line, {-1.0}, {1.0}, {48}, Boundary::Reflecting);
  auto mu = make_cloud(line, {{0.1}, {-0.2}}, {0.6, 0.4});
  std::vector<PointCloudMeasure> curve(5, mu);
  auto fields = regularize_curve(curve, chart, 0.3, 0.2, 4);
  REQUIRE(fields.size() == 4);
  for (const auto& f : fields) {
    CHECK(f.mass() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t c = 0; c < f.values.size(); ++c) {
      CHECK(f.values[c] == doctest::Approx(fields[0].values[c]).epsilon(1e-12));
    }
  }
}
