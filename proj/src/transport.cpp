#include "cclab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cclab {

namespace {

void check_sizes(const std::vector<double>& mu, const std::vector<double>& nu,
                 const std::vector<double>& cost, int m, int n) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("transport: empty marginal");
  if (static_cast<int>(mu.size()) != m || static_cast<int>(nu.size()) != n ||
      static_cast<std::size_t>(m) * n != cost.size()) {
    throw std::invalid_argument("transport: size mismatch");
  }
  for (double w : mu)
    if (!(w > 0.0)) throw std::invalid_argument("transport: nonpositive weight");
  for (double w : nu)
    if (!(w > 0.0)) throw std::invalid_argument("transport: nonpositive weight");
}

double plan_cost(const TransportPlan& plan, const std::vector<double>& cost, int n) {
  double total = 0.0;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    total += plan.flow[k] * cost[static_cast<std::size_t>(plan.from[k]) * n + plan.to[k]];
  }
  return total;
}

}  // namespace

// Transportation simplex on the dense bipartite problem. The basis is a
// spanning tree over the m row nodes and n column nodes; each pivot brings in
// the arc with the most negative reduced cost, cancels flow around the unique
// tree cycle it closes, and recomputes the potentials from scratch (cheap at
// these sizes, and immune to stale-subtree bugs).
TransportPlan min_cost_plan(const std::vector<double>& mu,
                            const std::vector<double>& nu,
                            const std::vector<double>& cost, int m, int n) {
  check_sizes(mu, nu, cost, m, n);
  std::vector<double> a = mu, b = nu;
  double sa = std::accumulate(a.begin(), a.end(), 0.0);
  double sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (std::fabs(sa - sb) > 1e-9 * std::max(sa, sb)) {
    throw std::invalid_argument("min_cost_plan: unbalanced marginals");
  }
  for (double& w : b) w *= sa / sb;

  struct Arc {
    int row, col;
    double flow;
  };
  std::vector<Arc> basis;
  basis.reserve(m + n - 1);

  // Northwest-corner start: advances one index per basic cell, giving exactly
  // m + n - 1 cells forming a staircase (a tree).
  {
    int i = 0, j = 0;
    double ra = a[0], cb = b[0];
    while (true) {
      double t = std::min(ra, cb);
      basis.push_back({i, j, std::max(t, 0.0)});
      ra -= t;
      cb -= t;
      if (i == m - 1 && j == n - 1) break;
      if ((ra <= cb && i < m - 1) || j == n - 1) {
        ++i;
        ra = a[i];
      } else {
        ++j;
        cb = b[j];
      }
    }
  }

  const int nodes = m + n;
  std::vector<std::vector<int>> adj(nodes);
  auto rebuild_adj = [&] {
    for (auto& v : adj) v.clear();
    for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
      adj[basis[k].row].push_back(k);
      adj[m + basis[k].col].push_back(k);
    }
  };
  rebuild_adj();

  std::vector<double> pot(nodes, 0.0);
  std::vector<int> order(nodes), via(nodes), prev(nodes);
  auto recompute_potentials = [&] {
    std::vector<char> seen(nodes, 0);
    pot[0] = 0.0;
    seen[0] = 1;
    int head = 0, tail = 0;
    order[tail++] = 0;
    while (head < tail) {
      int u = order[head++];
      for (int k : adj[u]) {
        int v = (u < m) ? m + basis[k].col : basis[k].row;
        if (seen[v]) continue;
        seen[v] = 1;
        double c = cost[static_cast<std::size_t>(basis[k].row) * n + basis[k].col];
        pot[v] = c - pot[u];
        order[tail++] = v;
      }
    }
  };
  recompute_potentials();

  double scale = 0.0;
  for (double c : cost) scale = std::max(scale, std::fabs(c));
  const double enter_tol = -1e-12 * std::max(1.0, scale);
  const long long max_pivots = 100LL * (m + n) + 1000;

  for (long long pivot = 0;; ++pivot) {
    if (pivot > max_pivots) {
      throw std::runtime_error("min_cost_plan: pivot limit exceeded");
    }
    int ei = -1, ej = -1;
    double best = enter_tol;
    for (int i = 0; i < m; ++i) {
      const double ui = pot[i];
      const double* ci = cost.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) {
        double rc = ci[j] - ui - pot[m + j];
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
        }
      }
    }
    if (ei < 0) break;

    // Tree path from the entering column node back to the entering row node.
    std::fill(prev.begin(), prev.end(), -1);
    std::fill(via.begin(), via.end(), -1);
    int src = m + ej, dst = ei;
    {
      std::vector<char> seen(nodes, 0);
      int head = 0, tail = 0;
      order[tail++] = src;
      seen[src] = 1;
      while (head < tail) {
        int u = order[head++];
        if (u == dst) break;
        for (int k : adj[u]) {
          int v = (u < m) ? m + basis[k].col : basis[k].row;
          if (seen[v]) continue;
          seen[v] = 1;
          prev[v] = u;
          via[v] = k;
          order[tail++] = v;
        }
      }
    }
    if (via[dst] < 0 && dst != src) {
      throw std::runtime_error("min_cost_plan: basis lost connectivity");
    }

    // Signs alternate along the cycle; path arcs at odd depth from the column
    // node lose flow.
    double t = std::numeric_limits<double>::infinity();
    int leave = -1;
    {
      int u = dst, depth = 1;
      std::vector<std::pair<int, int>> path;  // arc index, sign
      while (u != src) {
        path.push_back({via[u], 0});
        u = prev[u];
      }
      std::reverse(path.begin(), path.end());
      for (auto& [k, sg] : path) {
        sg = (depth % 2 == 1) ? -1 : +1;
        ++depth;
        if (sg < 0 && basis[k].flow < t) {
          t = basis[k].flow;
          leave = k;
        }
      }
      for (auto& [k, sg] : path) basis[k].flow += sg * t;
    }
    if (leave < 0) throw std::runtime_error("min_cost_plan: unbounded cycle");
    basis[leave] = {ei, ej, t};
    rebuild_adj();
    recompute_potentials();
  }

  TransportPlan plan;
  for (const Arc& arc : basis) {
    if (arc.flow > 0.0) {
      plan.from.push_back(arc.row);
      plan.to.push_back(arc.col);
      plan.flow.push_back(arc.flow);
    }
  }
  plan.cost = plan_cost(plan, cost, n);
  return plan;
}

namespace {

double log_sum_exp(const std::vector<double>& terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double t : terms) hi = std::max(hi, t);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - hi);
  return hi + std::log(s);
}

}  // namespace

namespace {

struct SoftPotentials {
  std::vector<double> f, g;
  double eps = 0.0;
};

// Annealed log-domain scaling iterations on balanced marginals a, b.
SoftPotentials sinkhorn_potentials(const std::vector<double>& a,
                                   const std::vector<double>& b,
                                   const std::vector<double>& cost, int m,
                                   int n, const TransportOptions& opt) {
  double mean_c = std::accumulate(cost.begin(), cost.end(), 0.0) / cost.size();
  mean_c = std::max(mean_c, 1e-15);

  SoftPotentials out;
  out.f.assign(m, 0.0);
  out.g.assign(n, 0.0);
  std::vector<double> la(m), lb(n), buf(std::max(m, n));
  for (int i = 0; i < m; ++i) la[i] = std::log(a[i]);
  for (int j = 0; j < n; ++j) lb[j] = std::log(b[j]);

  std::vector<double> ladder = opt.anneal;
  if (ladder.empty()) ladder = {0.03};
  for (double mult : ladder) {
    out.eps = mult * mean_c;
    double eps = out.eps;
    for (int it = 0; it < opt.sinkhorn_max_iter; ++it) {
      for (int i = 0; i < m; ++i) {
        buf.resize(n);
        const double* ci = cost.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) buf[j] = (out.g[j] - ci[j]) / eps;
        out.f[i] = eps * (la[i] - log_sum_exp(buf));
      }
      double viol = 0.0;
      for (int j = 0; j < n; ++j) {
        buf.resize(m);
        for (int i = 0; i < m; ++i) {
          buf[i] = (out.f[i] - cost[static_cast<std::size_t>(i) * n + j]) / eps;
        }
        double lse = log_sum_exp(buf);
        double col = std::exp(out.g[j] / eps + lse);
        viol += std::fabs(col - b[j]);
        out.g[j] = eps * (lb[j] - lse);
      }
      if (viol < opt.sinkhorn_tol) break;
    }
  }
  return out;
}

}  // namespace

TransportPlan entropic_plan(const std::vector<double>& mu,
                            const std::vector<double>& nu,
                            const std::vector<double>& cost, int m, int n,
                            const TransportOptions& opt) {
  check_sizes(mu, nu, cost, m, n);
  std::vector<double> a = mu, b = nu;
  double sa = std::accumulate(a.begin(), a.end(), 0.0);
  double sb = std::accumulate(b.begin(), b.end(), 0.0);
  for (double& w : b) w *= sa / sb;

  SoftPotentials pot = sinkhorn_potentials(a, b, cost, m, n, opt);
  const std::vector<double>& f = pot.f;
  const std::vector<double>& g = pot.g;
  const double eps = pot.eps;

  // Dense smoothed plan, then rounding so both marginals hold exactly.
  std::vector<double> plan(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    const double* ci = cost.data() + static_cast<std::size_t>(i) * n;
    double* pi = plan.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) pi[j] = std::exp((f[i] + g[j] - ci[j]) / eps);
  }
  std::vector<double> row(m, 0.0), col(n, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) row[i] += plan[static_cast<std::size_t>(i) * n + j];
  }
  for (int i = 0; i < m; ++i) {
    double sc = row[i] > 0.0 ? std::min(1.0, a[i] / row[i]) : 0.0;
    for (int j = 0; j < n; ++j) plan[static_cast<std::size_t>(i) * n + j] *= sc;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) col[j] += plan[static_cast<std::size_t>(i) * n + j];
  }
  for (int j = 0; j < n; ++j) {
    double sc = col[j] > 0.0 ? std::min(1.0, b[j] / col[j]) : 0.0;
    if (sc < 1.0) {
      for (int i = 0; i < m; ++i) plan[static_cast<std::size_t>(i) * n + j] *= sc;
    }
  }
  std::fill(row.begin(), row.end(), 0.0);
  std::fill(col.begin(), col.end(), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double p = plan[static_cast<std::size_t>(i) * n + j];
      row[i] += p;
      col[j] += p;
    }
  }
  double missing = 0.0;
  for (int i = 0; i < m; ++i) {
    row[i] = a[i] - row[i];
    missing += std::max(row[i], 0.0);
  }
  for (int j = 0; j < n; ++j) col[j] = b[j] - col[j];
  if (missing > 0.0) {
    for (int i = 0; i < m; ++i) {
      if (row[i] <= 0.0) continue;
      for (int j = 0; j < n; ++j) {
        if (col[j] <= 0.0) continue;
        plan[static_cast<std::size_t>(i) * n + j] += row[i] * col[j] / missing;
      }
    }
  }

  TransportPlan out;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double p = plan[static_cast<std::size_t>(i) * n + j];
      if (p > 0.0) {
        out.from.push_back(i);
        out.to.push_back(j);
        out.flow.push_back(p);
      }
    }
  }
  out.cost = plan_cost(out, cost, n);
  return out;
}

PointCloudMeasure grid_to_cloud(const DensityField& mu,
                                const TransportOptions& opt) {
  const GridChart& chart = mu.chart;
  const int dim = chart.dim();
  double vol = chart.cell_volume();
  double peak = 0.0;
  for (double v : mu.values) peak = std::max(peak, v);
  if (peak <= 0.0) throw std::invalid_argument("grid_to_cloud: zero density");
  double thr = opt.support_threshold * peak;

  std::vector<std::size_t> live;
  for (std::size_t c = 0; c < mu.values.size(); ++c) {
    if (mu.values[c] > thr) live.push_back(c);
  }
  if (live.empty()) throw std::invalid_argument("grid_to_cloud: empty support");

  if (static_cast<int>(live.size()) <= opt.atom_budget) {
    std::vector<Point> pts;
    std::vector<double> wts;
    pts.reserve(live.size());
    for (std::size_t c : live) {
      pts.push_back(chart.node(c));
      wts.push_back(mu.values[c] * vol);
    }
    return make_cloud(chart.model, pts, wts, true);
  }

  // Merge k x ... x k index blocks, growing k until the occupied block count
  // fits the budget. Each block becomes one atom at the mass-weighted center.
  int max_shape = *std::max_element(chart.shape.begin(), chart.shape.end());
  for (int k = 2; k <= max_shape; ++k) {
    std::vector<int> bshape(dim);
    for (int d = 0; d < dim; ++d) bshape[d] = (chart.shape[d] + k - 1) / k;
    std::size_t nb = 1;
    for (int d = 0; d < dim; ++d) nb *= bshape[d];
    std::vector<double> bw(nb, 0.0);
    std::vector<double> bc(nb * dim, 0.0);
    std::vector<int> idx(dim);
    for (std::size_t c : live) {
      chart.unflatten(c, idx);
      std::size_t b = 0;
      for (int d = 0; d < dim; ++d) b = b * bshape[d] + idx[d] / k;
      double w = mu.values[c];
      bw[b] += w;
      for (int d = 0; d < dim; ++d) bc[b * dim + d] += w * chart.coord(d, idx[d]);
    }
    std::size_t occupied = 0;
    for (double w : bw) occupied += (w > 0.0);
    if (static_cast<int>(occupied) > opt.atom_budget && k < max_shape) continue;

    std::vector<Point> pts;
    std::vector<double> wts;
    pts.reserve(occupied);
    for (std::size_t b = 0; b < nb; ++b) {
      if (bw[b] <= 0.0) continue;
      Point p(dim);
      for (int d = 0; d < dim; ++d) p[d] = bc[b * dim + d] / bw[b];
      pts.push_back(std::move(p));
      wts.push_back(bw[b] * vol);
    }
    return make_cloud(chart.model, pts, wts, true);
  }
  throw std::runtime_error("grid_to_cloud: aggregation failed");
}

namespace {

CloudPlan couple_clouds(const PointCloudMeasure& mu, const PointCloudMeasure& nu,
                        const TransportOptions& opt, bool squared) {
  if (mu.model.family != nu.model.family) {
    throw std::invalid_argument("transport: mismatched group models");
  }
  int m = static_cast<int>(mu.size()), n = static_cast<int>(nu.size());
  std::vector<double> cost(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double d = cc_distance(mu.model, mu.points[i], nu.points[j], opt.oracle);
      cost[static_cast<std::size_t>(i) * n + j] = squared ? d * d : d;
    }
  }
  std::vector<double> a = mu.weights, b = nu.weights;
  double sa = std::accumulate(a.begin(), a.end(), 0.0);
  double sb = std::accumulate(b.begin(), b.end(), 0.0);
  for (double& w : a) w /= sa;
  for (double& w : b) w /= sb;

  CloudPlan cp;
  cp.mu = mu;
  cp.nu = nu;
  for (double& w : cp.mu.weights) w /= sa;
  for (double& w : cp.nu.weights) w /= sb;
  if (m <= opt.lp_cap && n <= opt.lp_cap) {
    cp.plan = min_cost_plan(a, b, cost, m, n);
    cp.exact = true;
  } else {
    cp.plan = entropic_plan(a, b, cost, m, n, opt);
    cp.exact = false;
  }
  cp.cost2 = cp.plan.cost;
  return cp;
}

}  // namespace

CloudPlan w2_plan(const PointCloudMeasure& mu, const PointCloudMeasure& nu,
                  const TransportOptions& opt) {
  return couple_clouds(mu, nu, opt, true);
}

CloudPlan w2_plan(const DensityField& mu, const DensityField& nu,
                  const TransportOptions& opt) {
  return w2_plan(grid_to_cloud(mu, opt), grid_to_cloud(nu, opt), opt);
}

double w2_distance(const PointCloudMeasure& mu, const PointCloudMeasure& nu,
                   const TransportOptions& opt) {
  return std::sqrt(std::max(w2_plan(mu, nu, opt).cost2, 0.0));
}

double w2_distance(const DensityField& mu, const DensityField& nu,
                   const TransportOptions& opt) {
  return std::sqrt(std::max(w2_plan(mu, nu, opt).cost2, 0.0));
}

double w1_distance(const PointCloudMeasure& mu, const PointCloudMeasure& nu,
                   const TransportOptions& opt) {
  return couple_clouds(mu, nu, opt, false).plan.cost;
}

double w1_distance(const DensityField& mu, const DensityField& nu,
                   const TransportOptions& opt) {
  return w1_distance(grid_to_cloud(mu, opt), grid_to_cloud(nu, opt), opt);
}

double hopf_lax(const GroupModel& model, const std::vector<Point>& support,
                const std::vector<double>& phi, const Point& eval_at, double s,
                const MetricOracle& oracle) {
  if (support.size() != phi.size() || support.empty()) {
    throw std::invalid_argument("hopf_lax: support/value mismatch");
  }
  if (!(s > 0.0)) throw std::invalid_argument("hopf_lax: s must be positive");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < support.size(); ++k) {
    double d = cc_distance(model, eval_at, support[k], oracle);
    best = std::min(best, phi[k] + d * d / (2.0 * s));
  }
  return best;
}

double kantorovich_dual_value(const std::vector<double>& mu,
                              const std::vector<double>& nu,
                              const std::vector<double>& psi,
                              const std::vector<double>& phi) {
  if (mu.size() != psi.size() || nu.size() != phi.size()) {
    throw std::invalid_argument("kantorovich_dual_value: size mismatch");
  }
  double v = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) v += mu[i] * psi[i];
  for (std::size_t j = 0; j < nu.size(); ++j) v += nu[j] * phi[j];
  return v;
}

double kantorovich_ascent(const std::vector<double>& mu,
                          const std::vector<double>& nu,
                          const std::vector<double>& cost, int m, int n,
                          int rounds, std::vector<double>* psi_out,
                          std::vector<double>* phi_out) {
  check_sizes(mu, nu, cost, m, n);
  // Alternating c-transforms reach a fixed point after a single round, and a
  // cold start can stall well short of the optimum. Seed with annealed
  // entropic potentials, which land near the optimal dual pair; the
  // c-transform rounds then just project onto the feasible set.
  std::vector<double> a = mu, b = nu;
  double sa = std::accumulate(a.begin(), a.end(), 0.0);
  double sb = std::accumulate(b.begin(), b.end(), 0.0);
  for (double& w : b) w *= sa / sb;
  std::vector<double> psi(m, 0.0);
  std::vector<double> phi = sinkhorn_potentials(a, b, cost, m, n, {}).g;
  double value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i < m; ++i) {
      const double* ci = cost.data() + static_cast<std::size_t>(i) * n;
      double lo = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) lo = std::min(lo, ci[j] - phi[j]);
      psi[i] = lo;
    }
    for (int j = 0; j < n; ++j) {
      double lo = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        lo = std::min(lo, cost[static_cast<std::size_t>(i) * n + j] - psi[i]);
      }
      phi[j] = lo;
    }
    double next = kantorovich_dual_value(mu, nu, psi, phi);
    if (next <= value + 1e-14 * std::max(1.0, std::fabs(value))) {
      value = std::max(value, next);
      break;
    }
    value = next;
  }
  if (psi_out) *psi_out = psi;
  if (phi_out) *phi_out = phi;
  return value;
}

PointCloudMeasure displacement_interpolate(const CloudPlan& cp, double s,
                                           const MetricOracle& oracle) {
  std::vector<Point> pts;
  std::vector<double> wts;
  pts.reserve(cp.plan.size());
  for (std::size_t k = 0; k < cp.plan.size(); ++k) {
    const Point& x = cp.mu.points[cp.plan.from[k]];
    const Point& y = cp.nu.points[cp.plan.to[k]];
    pts.push_back(cc_geodesic_point(cp.mu.model, x, y, s, oracle));
    wts.push_back(cp.plan.flow[k]);
  }
  return make_cloud(cp.mu.model, pts, wts, true);
}

namespace {

// Reject cells cheaply before paying for a distance solve: both bounds hold
// with the exact metric, so no admissible cell is lost.
bool ball_prune(const GroupModel& model, const Point& xi, double r) {
  if (model.family != Family::Heisenberg1) return false;
  double rxy = std::hypot(xi[0], xi[1]);
  if (rxy > r) return true;
  constexpr double kPi = 3.14159265358979323846;
  if (2.0 * std::sqrt(kPi * std::fabs(xi[2])) - rxy > r) return true;
  return false;
}

}  // namespace

DensityField convolve_measure(const PointCloudMeasure& mu,
                              const GridChart& chart, double r,
                              const MetricOracle& oracle) {
  if (!(r > 0.0)) throw std::invalid_argument("convolve_measure: radius must be positive");
  const GroupModel& model = chart.model;
  const int dim = chart.dim();
  DensityField out;
  out.chart = chart;
  out.values.assign(chart.size(), 0.0);
  double vol = chart.cell_volume();
  constexpr double kPi = 3.14159265358979323846;

  std::vector<int> center(dim), idx(dim), hw(dim);
  std::vector<long long> hits;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    const Point& p = mu.points[a];
    chart.nearest_node(p, center);
    for (int d = 0; d < dim; ++d) {
      double win = r;
      if (model.family == Family::Heisenberg1 && d == 2) {
        win = r * r / (4.0 * kPi) + 0.5 * r * std::hypot(p[0], p[1]);
      }
      hw[d] = static_cast<int>(std::ceil(win / chart.spacing[d])) + 1;
    }
    hits.clear();
    // Odometer over the index window around the atom.
    std::vector<int> off(dim, 0);
    for (int d = 0; d < dim; ++d) off[d] = -hw[d];
    while (true) {
      bool valid = true;
      for (int d = 0; d < dim; ++d) {
        int i = center[d] + off[d];
        if (chart.boundary == Boundary::Periodic) {
          i %= chart.shape[d];
          if (i < 0) i += chart.shape[d];
        } else if (i < 0 || i >= chart.shape[d]) {
          valid = false;
          break;
        }
        idx[d] = i;
      }
      if (valid) {
        Point q = chart.node(idx);
        Point xi = multiply(model, inverse(model, p), q);
        if (!ball_prune(model, xi, r) &&
            cc_distance(model, p, q, oracle) <= r) {
          hits.push_back(chart.flatten(idx));
        }
      }
      int d = dim - 1;
      while (d >= 0) {
        if (++off[d] <= hw[d]) break;
        off[d] = -hw[d];
        --d;
      }
      if (d < 0) break;
    }
    if (hits.empty()) {
      chart.nearest_node(p, idx);
      hits.push_back(chart.flatten(idx));
    }
    double share = mu.weights[a] / (static_cast<double>(hits.size()) * vol);
    for (long long c : hits) out.values[static_cast<std::size_t>(c)] += share;
  }
  return out;
}

std::vector<DensityField> regularize_curve(
    const std::vector<PointCloudMeasure>& curve, const GridChart& chart,
    double r, double eta, int out_samples, const MetricOracle& oracle) {
  if (curve.empty()) throw std::invalid_argument("regularize_curve: empty curve");
  if (out_samples < 2) {
    throw std::invalid_argument("regularize_curve: need at least two samples");
  }
  const int K = static_cast<int>(curve.size());
  const double step = (K > 1) ? 1.0 / (K - 1) : 1.0;

  std::vector<DensityField> out;
  out.reserve(out_samples);
  for (int j = 0; j < out_samples; ++j) {
    double p = static_cast<double>(j) / (out_samples - 1);
    std::vector<Point> pts;
    std::vector<double> wts;
    if (eta <= 0.0 || K == 1) {
      int k = std::clamp(static_cast<int>(std::lround(p / step)), 0, K - 1);
      pts = curve[k].points;
      wts = curve[k].weights;
    } else {
      // Triangle weights on the (constant-extended) input grid.
      int kmin = static_cast<int>(std::floor((p - eta) / step)) - 1;
      int kmax = static_cast<int>(std::ceil((p + eta) / step)) + 1;
      double total = 0.0;
      for (int k = kmin; k <= kmax; ++k) {
        double w = 1.0 - std::fabs(k * step - p) / eta;
        if (w <= 0.0) continue;
        int src = std::clamp(k, 0, K - 1);
        for (std::size_t i = 0; i < curve[src].size(); ++i) {
          pts.push_back(curve[src].points[i]);
          wts.push_back(w * curve[src].weights[i]);
        }
        total += w;
      }
      if (total <= 0.0) {
        int k = std::clamp(static_cast<int>(std::lround(p / step)), 0, K - 1);
        pts = curve[k].points;
        wts = curve[k].weights;
      }
    }
    out.push_back(convolve_measure(make_cloud(chart.model, pts, wts, true),
                                   chart, r, oracle));
  }
  return out;
}

}  // namespace cclab
