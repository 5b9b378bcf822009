#pragma once

#include <vector>

#include "cclab/grid.hpp"
#include "cclab/metric.hpp"

namespace cclab {

// Relative entropy of a density against the uniform volume measure:
// integral of rho log rho (cells with rho = 0 contribute 0).
double entropy(const DensityField& mu);

// Entropy with the integrand clipped to cells where rho >= floor_value.
double entropy_truncated(const DensityField& mu, double floor_value);

// Fisher information: integral of Gamma(rho)/rho over cells where rho exceeds
// tau = 1e-14 * max(rho). right_invariant switches to the right frame.
double fisher_information(const DensityField& mu, bool right_invariant = false);

// Integral of d(x, x0)^2 against mu.
double second_moment(const DensityField& mu, const Point& x0,
                     const MetricOracle& oracle = {});

// Curvature profile t -> c(t) entering the contraction inequalities.
struct CurvatureFn {
  enum class Kind { Constant, Exponential, Tabulated };
  Kind kind = Kind::Constant;
  double C = 1.0;  // c(0)
  double K = 0.0;  // Exponential: c(t) = C exp(-K t)
  std::vector<double> knots, values;  // Tabulated: linear interpolation

  double operator()(double t) const;

  static CurvatureFn constant(double C);
  static CurvatureFn exponential(double C, double K);
  static CurvatureFn tabulated(std::vector<double> knots,
                               std::vector<double> values);
};

// I_p(t) = integral_0^t c(r)^p dr, adaptive Simpson to 1e-10.
double curvature_moment(const CurvatureFn& c, double p, double t);

// RI(t0, t1) = integral_0^1 c((1-s) t0 + s t1)^{-2} ds. RI(t, t) = c(t)^{-2}.
double mean_inverse_square(const CurvatureFn& c, double t0, double t1);

// B(h) = (RI(0, h)^{-1} - 1) / h, the coefficient of the heated convexity
// defect.
double heated_coefficient(const CurvatureFn& c, double h);

// Two-point entropy defect w(s) = -2 log((1-s)^{1-s} s^s); w(1/2) = log 4.
double defect_w(double s);

// Bound on the entropy wobble along a right-translated displacement curve:
// d * sqrt(2 s (1-s) (C^2 - 1) * fisher_right).
double sigma_bound(double displacement, double s, double C,
                   double fisher_right);

// Largest difference quotient |f(p) - f(q)| / d(p, q) over axis-adjacent node
// pairs.
double lip_estimate(const ScalarField& f, const MetricOracle& oracle = {});

}  // namespace cclab
