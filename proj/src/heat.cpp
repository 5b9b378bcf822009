#include "cclab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "cclab/kernels.hpp"

namespace cclab {

void Csr::apply(const double* x, double* y) const {
  kern::csr_spmv(rowptr.data(), col.data(), val.data(),
                 static_cast<std::size_t>(n), x, y);
}

std::vector<double> Csr::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < n; ++r) {
    for (std::int32_t k = rowptr[r]; k < rowptr[r + 1]; ++k) {
      if (col[k] == r) d[static_cast<std::size_t>(r)] = val[k];
    }
  }
  return d;
}

double HeatOperator::dt_limit() const {
  double h = chart.spacing[0];
  for (double s : chart.spacing) h = std::min(h, s);
  return h * h;
}

namespace {

std::vector<long long> strides_of(const GridChart& chart) {
  int d = chart.dim();
  std::vector<long long> st(d);
  st[d - 1] = 1;
  for (int a = d - 2; a >= 0; --a) st[a] = st[a + 1] * chart.shape[a + 1];
  return st;
}

struct EdgeAccumulator {
  std::vector<std::vector<std::pair<std::int32_t, double>>> off;
  std::vector<double> diag;

  explicit EdgeAccumulator(long long n)
      : off(static_cast<std::size_t>(n)), diag(static_cast<std::size_t>(n), 0.0) {}

  void add(long long p, long long q, double c) {
    if (c <= 0.0) return;
    off[static_cast<std::size_t>(p)].push_back({static_cast<std::int32_t>(q), c});
    off[static_cast<std::size_t>(q)].push_back({static_cast<std::int32_t>(p), c});
    diag[static_cast<std::size_t>(p)] -= c;
    diag[static_cast<std::size_t>(q)] -= c;
  }
};

Csr compress(EdgeAccumulator& acc) {
  Csr m;
  m.n = static_cast<int>(acc.off.size());
  m.rowptr.resize(static_cast<std::size_t>(m.n) + 1);
  std::size_t nnz = 0;
  for (int r = 0; r < m.n; ++r) nnz += acc.off[static_cast<std::size_t>(r)].size() + 1;
  m.col.reserve(nnz);
  m.val.reserve(nnz);
  m.rowptr[0] = 0;
  for (int r = 0; r < m.n; ++r) {
    auto& row = acc.off[static_cast<std::size_t>(r)];
    row.push_back({r, acc.diag[static_cast<std::size_t>(r)]});
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!m.col.empty() && m.rowptr[static_cast<std::size_t>(r)] <
                                static_cast<std::int32_t>(m.col.size()) &&
          m.col.back() == row[k].first) {
        m.val.back() += row[k].second;
      } else {
        m.col.push_back(row[k].first);
        m.val.push_back(row[k].second);
      }
    }
    m.rowptr[static_cast<std::size_t>(r) + 1] = static_cast<std::int32_t>(m.col.size());
    row.clear();
    row.shrink_to_fit();
  }
  return m;
}

}  // namespace

HeatOperator assemble_heat_operator(const GridChart& chart) {
  const int d = chart.dim();
  const long long n = chart.size();
  const auto st = strides_of(chart);
  EdgeAccumulator acc(n);

  std::vector<int> idx(d, 0);
  for (long long p = 0; p < n; ++p) {
    if (chart.model.family == Family::Heisenberg1) {
      const double x = chart.coord(0, idx[0]);
      const double y = chart.coord(1, idx[1]);
      const double hx = chart.spacing[0], hy = chart.spacing[1],
                   hz = chart.spacing[2];
      // Horizontal unit steps and their exact vertical drifts, split over the
      // two bracketing z-levels.
      const double drift[2] = {-0.5 * y * hx / hz, 0.5 * x * hy / hz};
      const double hstep[2] = {hx, hy};
      for (int f = 0; f < 2; ++f) {
        if (idx[f] + 1 >= chart.shape[f]) continue;
        const double s = drift[f];
        const double k0 = std::floor(s);
        const double w = s - k0;
        const double base = 1.0 / (hstep[f] * hstep[f]);
        for (int half = 0; half < 2; ++half) {
          const double cond = (half == 0 ? (1.0 - w) : w) * base;
          if (cond <= 0.0) continue;
          const long long dz = static_cast<long long>(k0) + half;
          const long long kz = idx[2] + dz;
          if (kz < 0 || kz >= chart.shape[2]) continue;
          acc.add(p, p + st[f] + dz * st[2], cond);
        }
      }
    } else {
      for (int a = 0; a < d; ++a) {
        const double cond = 1.0 / (chart.spacing[a] * chart.spacing[a]);
        if (idx[a] + 1 < chart.shape[a]) {
          acc.add(p, p + st[a], cond);
        } else if (chart.boundary == Boundary::Periodic) {
          if (chart.shape[a] > 2) {
            acc.add(p, p - static_cast<long long>(chart.shape[a] - 1) * st[a], cond);
          }
        }
      }
    }
    int a = d - 1;
    while (a >= 0) {
      if (++idx[a] < chart.shape[a]) break;
      idx[a] = 0;
      --a;
    }
  }

  HeatOperator op;
  op.chart = chart;
  op.lap = compress(acc);
  op.symmetrized = true;
  return op;
}

ScalarField sublaplacian_apply(const HeatOperator& op, const ScalarField& f) {
  if (!op.chart.compatible(f.chart)) {
    throw std::invalid_argument("sublaplacian_apply: chart mismatch");
  }
  ScalarField out{f.chart, std::vector<double>(f.values.size())};
  op.lap.apply(f.values.data(), out.values.data());
  return out;
}

namespace {

// Centered partial derivative along one axis with mirror ghosts at reflecting
// walls (the wall stencil degenerates to (f(1) - f(0)) / (2h)).
std::vector<double> centered_partial(const GridChart& chart,
                                     const std::vector<double>& v, int axis) {
  const int d = chart.dim();
  const long long n = chart.size();
  const auto st = strides_of(chart);
  std::vector<double> out(static_cast<std::size_t>(n));
  const double inv2h = 0.5 / chart.spacing[axis];
  std::vector<int> idx(d, 0);
  for (long long p = 0; p < n; ++p) {
    long long ip = p, im = p;
    if (idx[axis] + 1 < chart.shape[axis]) {
      ip = p + st[axis];
    } else if (chart.boundary == Boundary::Periodic) {
      ip = p - static_cast<long long>(chart.shape[axis] - 1) * st[axis];
    }
    if (idx[axis] > 0) {
      im = p - st[axis];
    } else if (chart.boundary == Boundary::Periodic) {
      im = p + static_cast<long long>(chart.shape[axis] - 1) * st[axis];
    }
    out[static_cast<std::size_t>(p)] =
        (v[static_cast<std::size_t>(ip)] - v[static_cast<std::size_t>(im)]) * inv2h;
    int a = d - 1;
    while (a >= 0) {
      if (++idx[a] < chart.shape[a]) break;
      idx[a] = 0;
      --a;
    }
  }
  return out;
}

}  // namespace

ScalarField carre_du_champ(const ScalarField& f, const ScalarField& g,
                           bool right_invariant) {
  if (!f.chart.compatible(g.chart)) {
    throw std::invalid_argument("carre_du_champ: chart mismatch");
  }
  const GridChart& chart = f.chart;
  ScalarField out{chart, std::vector<double>(f.values.size(), 0.0)};

  if (chart.model.family != Family::Heisenberg1) {
    for (int a = 0; a < chart.dim(); ++a) {
      auto df = centered_partial(chart, f.values, a);
      auto dg = (&f == &g) ? df : centered_partial(chart, g.values, a);
      for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] += df[i] * dg[i];
      }
    }
    return out;
  }

  auto fx = centered_partial(chart, f.values, 0);
  auto fy = centered_partial(chart, f.values, 1);
  auto fz = centered_partial(chart, f.values, 2);
  const bool same = (&f == &g) || (f.values == g.values);
  auto gx = same ? fx : centered_partial(chart, g.values, 0);
  auto gy = same ? fy : centered_partial(chart, g.values, 1);
  auto gz = same ? fz : centered_partial(chart, g.values, 2);

  const double sgn = right_invariant ? 1.0 : -1.0;
  std::vector<int> idx(3, 0);
  const long long n = chart.size();
  for (long long p = 0; p < n; ++p) {
    const double x = chart.coord(0, idx[0]);
    const double y = chart.coord(1, idx[1]);
    const std::size_t i = static_cast<std::size_t>(p);
    const double f1 = fx[i] + sgn * 0.5 * y * fz[i];
    const double f2 = fy[i] - sgn * 0.5 * x * fz[i];
    const double g1 = gx[i] + sgn * 0.5 * y * gz[i];
    const double g2 = gy[i] - sgn * 0.5 * x * gz[i];
    out.values[i] = f1 * g1 + f2 * g2;
    int a = 2;
    while (a >= 0) {
      if (++idx[a] < chart.shape[a]) break;
      idx[a] = 0;
      --a;
    }
  }
  return out;
}

ScalarField carre_du_champ(const ScalarField& f, bool right_invariant) {
  return carre_du_champ(f, f, right_invariant);
}

ScalarField operator_carre_du_champ(const HeatOperator& op, const ScalarField& f,
                                    const ScalarField& g) {
  if (!op.chart.compatible(f.chart) || !op.chart.compatible(g.chart)) {
    throw std::invalid_argument("operator_carre_du_champ: chart mismatch");
  }
  const std::size_t n = f.values.size();
  std::vector<double> fg(n);
  for (std::size_t i = 0; i < n; ++i) fg[i] = f.values[i] * g.values[i];
  std::vector<double> lfg(n), lf(n), lg(n);
  op.lap.apply(fg.data(), lfg.data());
  op.lap.apply(f.values.data(), lf.data());
  op.lap.apply(g.values.data(), lg.data());
  ScalarField out{f.chart, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = 0.5 * (lfg[i] - f.values[i] * lg[i] - g.values[i] * lf[i]);
  }
  return out;
}

namespace {

// Solves (I - gamma * Lap) u = b by Jacobi-preconditioned CG, starting from u.
void solve_shifted(const Csr& lap, const std::vector<double>& lap_diag,
                   double gamma, const std::vector<double>& b,
                   std::vector<double>& u, double tol, int max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), ap(n), tmp(n);

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    lap.apply(x.data(), tmp.data());
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - gamma * tmp[i];
  };

  apply(u, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const double bnorm = std::sqrt(kern::dot(b.data(), b.data(), n));
  const double stop = tol * std::max(bnorm, 1e-300);

  std::vector<double> prec(n);
  for (std::size_t i = 0; i < n; ++i) prec[i] = 1.0 / (1.0 - gamma * lap_diag[i]);

  for (std::size_t i = 0; i < n; ++i) z[i] = prec[i] * r[i];
  p = z;
  double rz = kern::dot(r.data(), z.data(), n);
  for (int it = 0; it < max_iter; ++it) {
    double rnorm = std::sqrt(kern::dot(r.data(), r.data(), n));
    if (rnorm <= stop) return;
    apply(p, ap);
    double alpha = rz / kern::dot(p.data(), ap.data(), n);
    kern::axpy(alpha, p.data(), u.data(), n);
    kern::axpy(-alpha, ap.data(), r.data(), n);
    for (std::size_t i = 0; i < n; ++i) z[i] = prec[i] * r[i];
    double rz_new = kern::dot(r.data(), z.data(), n);
    kern::xpby(z.data(), rz_new / rz, p.data(), n);
    rz = rz_new;
  }
  double rnorm = std::sqrt(kern::dot(r.data(), r.data(), n));
  if (rnorm > stop) {
    throw std::runtime_error("heat solver: CG failed to reach tolerance " +
                             std::to_string(tol));
  }
}

}  // namespace

ScalarField heat_evolve(const HeatOperator& op, const ScalarField& f, double t,
                        const EvolveOptions& opts) {
  if (!op.chart.compatible(f.chart)) {
    throw std::invalid_argument("heat_evolve: chart mismatch");
  }
  if (t < 0.0) throw std::invalid_argument("heat_evolve: negative time");
  ScalarField out = f;
  if (t == 0.0) return out;

  double dt = opts.dt > 0.0 ? opts.dt : op.dt_limit();
  long long steps = std::max<long long>(1, static_cast<long long>(std::ceil(t / dt - 1e-9)));
  dt = t / static_cast<double>(steps);

  const std::size_t n = out.values.size();
  const auto lap_diag = op.lap.diagonal();
  std::vector<double> b(n), lf(n);
  for (long long s = 0; s < steps; ++s) {
    const bool implicit = s < opts.startup_implicit_steps;
    if (implicit) {
      b = out.values;
      solve_shifted(op.lap, lap_diag, dt, b, out.values, opts.cg_tol,
                    opts.cg_max_iter);
    } else {
      op.lap.apply(out.values.data(), lf.data());
      for (std::size_t i = 0; i < n; ++i) b[i] = out.values[i] + 0.5 * dt * lf[i];
      solve_shifted(op.lap, lap_diag, 0.5 * dt, b, out.values, opts.cg_tol,
                    opts.cg_max_iter);
    }
  }
  return out;
}

DensityField heat_evolve_density(const HeatOperator& op, const DensityField& mu,
                                 double t, const EvolveOptions& opts) {
  ScalarField f{mu.chart, mu.values};
  double mass0 = mu.mass();
  ScalarField evolved = heat_evolve(op, f, t, opts);
  double total = 0.0;
  for (double& v : evolved.values) {
    if (v < 0.0) v = 0.0;
    total += v;
  }
  total *= mu.chart.cell_volume();
  if (!(total > 0.0)) throw std::runtime_error("heat_evolve_density: mass lost");
  double scale = mass0 / total;
  for (double& v : evolved.values) v *= scale;
  return DensityField{evolved.chart, std::move(evolved.values)};
}

DensityField point_mass_density(const GridChart& chart, const Point& x0,
                                DeltaInit init) {
  std::vector<double> vals(static_cast<std::size_t>(chart.size()), 0.0);
  if (init == DeltaInit::Cell) {
    vals[static_cast<std::size_t>(chart.nearest_node(x0))] = 1.0;
    return density_from_values(chart, std::move(vals), true);
  }
  Point c = chart.node(chart.nearest_node(x0));
  const int d = chart.dim();
  const long long n = chart.size();
  for (long long p = 0; p < n; ++p) {
    Point q = chart.node(p);
    double e = 0.0;
    for (int a = 0; a < d; ++a) {
      double dd = q[a] - c[a];
      if (chart.boundary == Boundary::Periodic) {
        dd = std::remainder(dd, chart.hi[a] - chart.lo[a]);
      }
      double s = chart.spacing[a];
      e += dd * dd / (2.0 * s * s);
    }
    if (e < 40.0) vals[static_cast<std::size_t>(p)] = std::exp(-e);
  }
  return density_from_values(chart, std::move(vals), true);
}

DensityField heat_kernel(const HeatOperator& op, const Point& x0, double t,
                         DeltaInit init, const EvolveOptions& opts) {
  DensityField delta = point_mass_density(op.chart, x0, init);
  EvolveOptions o = opts;
  if (o.startup_implicit_steps == 0 && init == DeltaInit::Cell) {
    o.startup_implicit_steps = 2;
  }
  return heat_evolve_density(op, delta, t, o);
}

DensityField dual_heat_on_measure(const HeatOperator& op,
                                  const PointCloudMeasure& mu, double t,
                                  DeltaInit init, const EvolveOptions& opts) {
  std::vector<double> vals(static_cast<std::size_t>(op.chart.size()), 0.0);
  for (std::size_t a = 0; a < mu.points.size(); ++a) {
    DensityField atom = point_mass_density(op.chart, mu.points[a], init);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      vals[i] += mu.weights[a] * atom.values[i];
    }
  }
  DensityField dep = density_from_values(op.chart, std::move(vals), false);
  EvolveOptions o = opts;
  if (o.startup_implicit_steps == 0 && init == DeltaInit::Cell) {
    o.startup_implicit_steps = 2;
  }
  return heat_evolve_density(op, dep, t, o);
}

Mollifier::Mollifier(double lo, double hi, int panels)
    : lo_(lo), hi_(hi), panels_(panels) {
  if (!(0.0 < lo && lo < hi)) {
    throw std::invalid_argument("Mollifier: need 0 < lo < hi");
  }
  if (panels < 2) throw std::invalid_argument("Mollifier: need panels >= 2");
  const int m = 2 * panels_;
  const double dr = (hi_ - lo_) / m;
  double s = 0.0;
  for (int j = 0; j <= m; ++j) {
    double wgt = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    s += wgt * raw(lo_ + j * dr);
  }
  norm_ = s * dr / 3.0;
}

double Mollifier::raw(double r) const {
  const double u = (2.0 * r - (lo_ + hi_)) / (hi_ - lo_);
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

double Mollifier::raw_d(double r) const {
  const double u = (2.0 * r - (lo_ + hi_)) / (hi_ - lo_);
  if (u <= -1.0 || u >= 1.0) return 0.0;
  const double q = 1.0 - u * u;
  return raw(r) * (-2.0 * u / (q * q)) * (2.0 / (hi_ - lo_));
}

double Mollifier::k(double r) const { return raw(r) / norm_; }
double Mollifier::dk(double r) const { return raw_d(r) / norm_; }

namespace {

ScalarField mollifier_quadrature(const HeatOperator& op, const ScalarField& f,
                                 double eps, const Mollifier& kappa,
                                 const EvolveOptions& opts, bool derivative) {
  if (!(eps > 0.0)) throw std::invalid_argument("mollify: eps must be positive");
  const int m = 2 * kappa.panels();
  const double dr = (kappa.hi() - kappa.lo()) / m;
  ScalarField acc{f.chart, std::vector<double>(f.values.size(), 0.0)};
  ScalarField leg = heat_evolve(op, f, eps * kappa.lo(), opts);
  for (int j = 0; j <= m; ++j) {
    const double r = kappa.lo() + j * dr;
    if (j > 0) leg = heat_evolve(op, leg, eps * dr, opts);
    double wgt = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    wgt *= dr / 3.0;
    const double coef = wgt * (derivative ? kappa.dk(r) / eps : kappa.k(r));
    if (coef == 0.0) continue;
    kern::axpy(coef, leg.values.data(), acc.values.data(), acc.values.size());
  }
  return acc;
}

}  // namespace

ScalarField mollify_semigroup(const HeatOperator& op, const ScalarField& f,
                              double eps, const Mollifier& kappa,
                              const EvolveOptions& opts) {
  return mollifier_quadrature(op, f, eps, kappa, opts, false);
}

ScalarField mollify_laplacian_rhs(const HeatOperator& op, const ScalarField& f,
                                  double eps, const Mollifier& kappa,
                                  const EvolveOptions& opts) {
  return mollifier_quadrature(op, f, eps, kappa, opts, true);
}

}  // namespace cclab
