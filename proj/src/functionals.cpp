#include "cclab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cclab/heat.hpp"

namespace cclab {

double entropy(const DensityField& mu) {
  double s = 0.0;
  for (double v : mu.values) {
    if (v > 0.0) s += v * std::log(v);
  }
  return s * mu.chart.cell_volume();
}

double entropy_truncated(const DensityField& mu, double floor_value) {
  double s = 0.0;
  for (double v : mu.values) {
    if (v >= floor_value && v > 0.0) s += v * std::log(v);
  }
  return s * mu.chart.cell_volume();
}

double fisher_information(const DensityField& mu, bool right_invariant) {
  double peak = 0.0;
  for (double v : mu.values) peak = std::max(peak, v);
  if (!(peak > 0.0)) throw std::invalid_argument("fisher_information: empty density");
  const double tau = 1e-14 * peak;
  ScalarField rho{mu.chart, mu.values};
  ScalarField g = carre_du_champ(rho, right_invariant);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.values.size(); ++i) {
    if (mu.values[i] > tau) s += g.values[i] / mu.values[i];
  }
  return s * mu.chart.cell_volume();
}

double second_moment(const DensityField& mu, const Point& x0,
                     const MetricOracle& oracle) {
  const GridChart& chart = mu.chart;
  double s = 0.0;
  for (long long i = 0; i < chart.size(); ++i) {
    double w = mu.values[static_cast<std::size_t>(i)];
    if (w == 0.0) continue;
    double d = cc_distance(chart.model, x0, chart.node(i), oracle);
    s += w * d * d;
  }
  return s * chart.cell_volume();
}

CurvatureFn CurvatureFn::constant(double C) {
  CurvatureFn c;
  c.kind = Kind::Constant;
  c.C = C;
  return c;
}

CurvatureFn CurvatureFn::exponential(double C, double K) {
  CurvatureFn c;
  c.kind = Kind::Exponential;
  c.C = C;
  c.K = K;
  return c;
}

CurvatureFn CurvatureFn::tabulated(std::vector<double> knots,
                                   std::vector<double> values) {
  if (knots.size() < 2 || knots.size() != values.size()) {
    throw std::invalid_argument("CurvatureFn::tabulated: need matching knots/values, >= 2");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i] > knots[i - 1])) {
      throw std::invalid_argument("CurvatureFn::tabulated: knots must increase");
    }
  }
  CurvatureFn c;
  c.kind = Kind::Tabulated;
  c.C = values.front();
  c.knots = std::move(knots);
  c.values = std::move(values);
  return c;
}

double CurvatureFn::operator()(double t) const {
  switch (kind) {
    case Kind::Constant:
      return C;
    case Kind::Exponential:
      return C * std::exp(-K * t);
    case Kind::Tabulated: {
      if (t < knots.front() - 1e-12 || t > knots.back() + 1e-12) {
        throw std::domain_error("CurvatureFn: time outside tabulated range");
      }
      t = std::clamp(t, knots.front(), knots.back());
      auto it = std::upper_bound(knots.begin(), knots.end(), t);
      std::size_t j = std::min(knots.size() - 1,
                               static_cast<std::size_t>(it - knots.begin()));
      if (j == 0) j = 1;
      double u = (t - knots[j - 1]) / (knots[j] - knots[j - 1]);
      return (1.0 - u) * values[j - 1] + u * values[j];
    }
  }
  return C;
}

namespace {

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate_adaptive(const F& f, double a, double b, double tol) {
  if (b == a) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

double curvature_moment(const CurvatureFn& c, double p, double t) {
  if (t < 0.0) throw std::invalid_argument("curvature_moment: negative time");
  return integrate_adaptive([&](double r) { return std::pow(c(r), p); }, 0.0, t,
                            1e-10);
}

double mean_inverse_square(const CurvatureFn& c, double t0, double t1) {
  if (t0 < 0.0 || t1 < 0.0) {
    throw std::invalid_argument("mean_inverse_square: negative time");
  }
  if (t0 == t1) {
    double v = c(t0);
    return 1.0 / (v * v);
  }
  return integrate_adaptive(
      [&](double s) {
        double v = c((1.0 - s) * t0 + s * t1);
        return 1.0 / (v * v);
      },
      0.0, 1.0, 1e-10);
}

double heated_coefficient(const CurvatureFn& c, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("heated_coefficient: h must be positive");
  return (1.0 / mean_inverse_square(c, 0.0, h) - 1.0) / h;
}

double defect_w(double s) {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("defect_w: s outside [0, 1]");
  if (s == 0.0 || s == 1.0) return 0.0;
  return -2.0 * ((1.0 - s) * std::log(1.0 - s) + s * std::log(s));
}

double sigma_bound(double displacement, double s, double C,
                   double fisher_right) {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("sigma_bound: s outside [0, 1]");
  double arg = 2.0 * s * (1.0 - s) * (C * C - 1.0) * fisher_right;
  if (arg < 0.0) arg = 0.0;
  return displacement * std::sqrt(arg);
}

double lip_estimate(const ScalarField& f, const MetricOracle& oracle) {
  const GridChart& chart = f.chart;
  const int d = chart.dim();
  const long long n = chart.size();
  std::vector<long long> st(d);
  st[d - 1] = 1;
  for (int a = d - 2; a >= 0; --a) st[a] = st[a + 1] * chart.shape[a + 1];

  // Distance to the +axis neighbor depends on at most one transverse
  // coordinate (Heisenberg drift), so cache per (axis, transverse index).
  auto step_distance = [&](int axis, const std::vector<int>& idx) {
    Point p = Point(d, 0.0);
    for (int a = 0; a < d; ++a) p[a] = chart.coord(a, idx[a]);
    Point q = p;
    q[axis] = chart.coord(axis, idx[axis] + 1 < chart.shape[axis] ? idx[axis] + 1 : 0);
    if (chart.boundary == Boundary::Periodic && idx[axis] + 1 >= chart.shape[axis]) {
      q[axis] = chart.coord(axis, 0) + (chart.hi[axis] - chart.lo[axis]);
    }
    return cc_distance(chart.model, p, q, oracle);
  };

  double best = 0.0;
  std::vector<int> idx(d, 0);
  std::vector<std::vector<double>> cache(d);
  if (chart.model.family == Family::Heisenberg1) {
    cache[0].assign(chart.shape[1], -1.0);  // x-step distance varies with y
    cache[1].assign(chart.shape[0], -1.0);  // y-step distance varies with x
    cache[2].assign(1, -1.0);
  } else {
    for (int a = 0; a < d; ++a) cache[a].assign(1, -1.0);
  }

  for (long long p = 0; p < n; ++p) {
    for (int a = 0; a < d; ++a) {
      bool wrap = idx[a] + 1 >= chart.shape[a];
      if (wrap && chart.boundary != Boundary::Periodic) continue;
      long long q = wrap ? p - static_cast<long long>(chart.shape[a] - 1) * st[a]
                         : p + st[a];
      std::size_t key = 0;
      if (chart.model.family == Family::Heisenberg1) {
        key = (a == 0) ? static_cast<std::size_t>(idx[1])
                       : (a == 1) ? static_cast<std::size_t>(idx[0]) : 0;
      }
      double& dc = cache[a][key];
      if (dc < 0.0) dc = step_distance(a, idx);
      double quot = std::fabs(f.values[static_cast<std::size_t>(q)] -
                              f.values[static_cast<std::size_t>(p)]) / dc;
      best = std::max(best, quot);
    }
    int a = d - 1;
    while (a >= 0) {
      if (++idx[a] < chart.shape[a]) break;
      idx[a] = 0;
      --a;
    }
  }
  return best;
}

}  // namespace cclab
