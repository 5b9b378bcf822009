#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cclab/heat.hpp"

using namespace cclab;

namespace {
constexpr double kPi = 3.14159265358979323846;

GridChart abelian_chart(int n, double half) {
  auto m = GroupModel::abelian_box(2);
  return make_chart(m, {-half, -half}, {half, half}, {n, n}, Boundary::Reflecting);
}

GridChart h1_chart(int n, double half, int nz = -1) {
  auto m = GroupModel::heisenberg1();
  if (nz < 0) nz = n;
  return make_chart(m, {-half, -half, -half}, {half, half, half}, {n, n, nz},
                    Boundary::Reflecting);
}

double max_interior_abs(const ScalarField& f, const std::vector<double>& ref,
                        double margin) {
  auto win = interior_window(f.chart, margin);
  double worst = 0.0;
  for (long long i : win) {
    worst = std::max(worst, std::fabs(f.values[(std::size_t)i] - ref[(std::size_t)i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("operator is symmetric with zero row sums and nonnegative rates") {
  for (const GridChart& chart : {abelian_chart(12, 2.0), h1_chart(10, 1.5)}) {
    auto op = assemble_heat_operator(chart);
    const Csr& A = op.lap;
    // Row sums vanish (mass conservation).
    for (int r = 0; r < A.n; ++r) {
      double s = 0.0;
      for (int k = A.rowptr[r]; k < A.rowptr[r + 1]; ++k) {
        s += A.val[k];
        if (A.col[k] != r) CHECK(A.val[k] >= 0.0);
      }
      CHECK(std::fabs(s) < 1e-9);
    }
    // Symmetry: A[r][c] == A[c][r].
    for (int r = 0; r < A.n; ++r) {
      for (int k = A.rowptr[r]; k < A.rowptr[r + 1]; ++k) {
        int c = A.col[k];
        if (c <= r) continue;
        double vcr = 0.0;
        for (int k2 = A.rowptr[c]; k2 < A.rowptr[c + 1]; ++k2) {
          if (A.col[k2] == r) vcr = A.val[k2];
        }
        CHECK(A.val[k] == doctest::Approx(vcr).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("sublaplacian consistency on polynomial data") {
  // Abelian: Laplacian of x^2 is 2 (compact stencil is exact on quadratics).
  {
    auto chart = abelian_chart(24, 2.0);
    auto op = assemble_heat_operator(chart);
    auto f = sample_scalar(chart, [](const Point& p) { return p[0] * p[0]; });
    auto lf = sublaplacian_apply(op, f);
    std::vector<double> ref(f.values.size(), 2.0);
    CHECK(max_interior_abs(lf, ref, 0.2) < 1e-9);
  }
  // Heisenberg: Delta(x^2 + y^2) = 4 and Delta(z) = 0, exactly in the interior.
  {
    auto chart = h1_chart(12, 1.5);
    auto op = assemble_heat_operator(chart);
    auto f = sample_scalar(chart, [](const Point& p) { return p[0] * p[0] + p[1] * p[1]; });
    auto lf = sublaplacian_apply(op, f);
    std::vector<double> ref(f.values.size(), 4.0);
    CHECK(max_interior_abs(lf, ref, 0.2) < 1e-9);

    auto g = sample_scalar(chart, [](const Point& p) { return p[2]; });
    auto lg = sublaplacian_apply(op, g);
    std::vector<double> zero(g.values.size(), 0.0);
    CHECK(max_interior_abs(lg, zero, 0.2) < 1e-9);
  }
  // Heisenberg with refined vertical spacing: Delta(z^2) -> (x^2 + y^2)/2.
  {
    auto chart = h1_chart(16, 1.0, 80);
    auto op = assemble_heat_operator(chart);
    auto f = sample_scalar(chart, [](const Point& p) { return p[2] * p[2]; });
    auto lf = sublaplacian_apply(op, f);
    std::vector<double> ref(f.values.size());
    for (long long i = 0; i < chart.size(); ++i) {
      Point p = chart.node(i);
      ref[(std::size_t)i] = 0.5 * (p[0] * p[0] + p[1] * p[1]);
    }
    CHECK(max_interior_abs(lf, ref, 0.2) < 0.06);
  }
}

TEST_CASE("carre du champ matches frame formulas") {
  auto chart = h1_chart(14, 1.5);
  auto f = sample_scalar(chart, [](const Point& p) { return p[2]; });
  auto g = carre_du_champ(f);
  auto gt = carre_du_champ(f, /*right_invariant=*/true);
  auto win = interior_window(chart, 0.2);
  for (long long i : win) {
    Point p = chart.node(i);
    double expect = 0.25 * (p[0] * p[0] + p[1] * p[1]);
    CHECK(g.values[(std::size_t)i] == doctest::Approx(expect).epsilon(1e-10));
    CHECK(gt.values[(std::size_t)i] == doctest::Approx(expect).epsilon(1e-10));
  }
  // f = x + z separates left and right frames.
  auto h = sample_scalar(chart, [](const Point& p) { return p[0] + p[2]; });
  auto gh = carre_du_champ(h);
  auto gth = carre_du_champ(h, true);
  for (long long i : win) {
    Point p = chart.node(i);
    double left = (1.0 - 0.5 * p[1]) * (1.0 - 0.5 * p[1]) + 0.25 * p[0] * p[0];
    double right = (1.0 + 0.5 * p[1]) * (1.0 + 0.5 * p[1]) + 0.25 * p[0] * p[0];
    CHECK(gh.values[(std::size_t)i] == doctest::Approx(left).epsilon(1e-10));
    CHECK(gth.values[(std::size_t)i] == doctest::Approx(right).epsilon(1e-10));
  }
}

TEST_CASE("carre du champ is nonnegative and bilinear-symmetric") {
  auto chart = h1_chart(10, 1.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f{chart, {}}, g{chart, {}};
  for (long long i = 0; i < chart.size(); ++i) {
    f.values.push_back(u(rng));
    g.values.push_back(u(rng));
  }
  auto gamma_ff = carre_du_champ(f);
  for (double v : gamma_ff.values) CHECK(v >= 0.0);
  auto fg = carre_du_champ(f, g);
  auto gf = carre_du_champ(g, f);
  for (std::size_t i = 0; i < fg.values.size(); ++i) {
    CHECK(fg.values[i] == doctest::Approx(gf.values[i]).epsilon(1e-13));
  }
}

TEST_CASE("heat flow conserves mass and respects the maximum principle") {
  auto chart = h1_chart(14, 1.5);
  auto op = assemble_heat_operator(chart);
  auto f = sample_scalar(chart, [](const Point& p) {
    return std::sin(1.3 * p[0]) * std::cos(0.9 * p[1]) + 0.4 * std::sin(1.1 * p[2]);
  });
  double lo = *std::min_element(f.values.begin(), f.values.end());
  double hi = *std::max_element(f.values.begin(), f.values.end());
  double sum0 = 0.0;
  for (double v : f.values) sum0 += v;

  auto ft = heat_evolve(op, f, 0.1);
  double sum1 = 0.0;
  for (double v : ft.values) {
    sum1 += v;
    CHECK(v >= lo - 1e-8);
    CHECK(v <= hi + 1e-8);
  }
  CHECK(std::fabs(sum1 - sum0) / std::max(1.0, std::fabs(sum0)) < 1e-8);
}

TEST_CASE("semigroup composition") {
  auto chart = abelian_chart(32, 2.0);
  auto op = assemble_heat_operator(chart);
  auto f = sample_scalar(chart, [](const Point& p) {
    return std::exp(-(p[0] * p[0] + p[1] * p[1]));
  });
  EvolveOptions opts;
  opts.dt = op.dt_limit();
  auto two_steps = heat_evolve(op, heat_evolve(op, f, 0.0625, opts), 0.0625, opts);
  auto one_step = heat_evolve(op, f, 0.125, opts);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    CHECK(std::fabs(two_steps.values[i] - one_step.values[i]) < 1e-7);
  }
}

TEST_CASE("abelian heat matches the gaussian solution") {
  auto m = GroupModel::abelian_box(1);
  auto chart = make_chart(m, {-6.0}, {6.0}, {256}, Boundary::Reflecting);
  auto op = assemble_heat_operator(chart);
  const double s0 = 0.15, t = 0.1, s1 = s0 + 2.0 * t;
  auto f0 = sample_density(chart, [&](const Point& p) {
    return std::exp(-p[0] * p[0] / (2.0 * s0)) / std::sqrt(2.0 * kPi * s0);
  });
  auto ft = heat_evolve_density(op, f0, t);
  double err = 0.0, norm = 0.0;
  for (long long i = 0; i < chart.size(); ++i) {
    double x = chart.node(i)[0];
    double exact = std::exp(-x * x / (2.0 * s1)) / std::sqrt(2.0 * kPi * s1);
    err += std::fabs(ft.values[(std::size_t)i] - exact);
    norm += exact;
  }
  CHECK(err / norm < 1e-2);
}

TEST_CASE("heat kernel is symmetric and nonnegative") {
  auto chart = h1_chart(14, 1.5);
  auto op = assemble_heat_operator(chart);
  Point a{0.3, 0.1, 0.0}, b{-0.4, 0.2, 0.3};
  double t = 0.08;
  auto ka = heat_kernel(op, a, t);
  auto kb = heat_kernel(op, b, t);
  long long ia = chart.nearest_node(a), ib = chart.nearest_node(b);
  double vab = ka.values[(std::size_t)ib], vba = kb.values[(std::size_t)ia];
  CHECK(std::fabs(vab - vba) / std::max({vab, vba, 1e-12}) < 1e-6);
  for (double v : ka.values) CHECK(v >= 0.0);

  // Raw evolution (before density clipping) stays essentially nonnegative.
  auto delta = point_mass_density(chart, a);
  ScalarField raw{chart, delta.values};
  EvolveOptions opts;
  opts.startup_implicit_steps = 2;
  auto evolved = heat_evolve(op, raw, t, opts);
  double min_v = *std::min_element(evolved.values.begin(), evolved.values.end());
  CHECK(min_v >= -1e-10);
}

TEST_CASE("dual heat flow averages kernels linearly") {
  auto chart = abelian_chart(24, 2.0);
  auto op = assemble_heat_operator(chart);
  auto mu = make_cloud(chart.model, {{0.5, 0.0}, {-0.5, 0.0}}, {0.25, 0.75});
  auto ht = dual_heat_on_measure(op, mu, 0.05);
  auto k1 = heat_kernel(op, {0.5, 0.0}, 0.05);
  auto k2 = heat_kernel(op, {-0.5, 0.0}, 0.05);
  for (std::size_t i = 0; i < ht.values.size(); ++i) {
    double expect = 0.25 * k1.values[i] + 0.75 * k2.values[i];
    CHECK(std::fabs(ht.values[i] - expect) < 1e-8);
  }
  CHECK(ht.mass() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("mollified semigroup fixes constants and satisfies the laplacian identity") {
  auto chart = abelian_chart(32, 2.0);
  auto op = assemble_heat_operator(chart);
  auto ones = sample_scalar(chart, [](const Point&) { return 1.0; });
  auto m1 = mollify_semigroup(op, ones, 0.3);
  for (double v : m1.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  auto f = sample_scalar(chart, [](const Point& p) {
    return std::exp(-2.0 * (p[0] * p[0] + p[1] * p[1]));
  });
  double eps = 0.4;
  auto hf = mollify_semigroup(op, f, eps);
  auto lhs = sublaplacian_apply(op, hf);
  auto rhs = mollify_laplacian_rhs(op, f, eps);
  // -Delta(h^eps f) equals the derivative-kernel average.
  double num = 0.0, den = 0.0;
  auto win = interior_window(chart, 0.1);
  for (long long i : win) {
    num += std::fabs(lhs.values[(std::size_t)i] + rhs.values[(std::size_t)i]);
    den += std::fabs(rhs.values[(std::size_t)i]) + 1e-15;
  }
  CHECK(num / den < 2e-2);
}
