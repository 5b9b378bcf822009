#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cclab/functionals.hpp"
#include "cclab/grid.hpp"
#include "cclab/heat.hpp"
#include "cclab/measure.hpp"
#include "cclab/metric.hpp"
#include "cclab/transport.hpp"

namespace cclab {

// Relative tolerances for the three kinds of comparison: pointwise field
// inequalities, integral quantities, and optimal-transport quantities.
struct ToleranceSpec {
  double pointwise_rel = 5e-2;
  double integral_rel = 1e-2;
  double ot_rel = 2e-2;
};

enum class Verdict { Pass, Fail, Degenerate };
const char* verdict_name(Verdict v);

// One certified inequality instance. slack = rhs - lhs; the verdict is pass
// when slack >= -tol * scale with scale = max(|lhs|, |rhs|, noise floor), and
// degenerate when both sides sit below the noise floor. t, s, h are the case
// parameters when meaningful, NaN otherwise.
struct CertReport {
  std::string name;
  std::string anchor;
  std::string case_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tol = 0.0;
  Verdict verdict = Verdict::Pass;
  std::string window;
  double t = std::nan("");
  double s = std::nan("");
  double h = std::nan("");
  std::string extra;
};

struct NamedFunction {
  std::string name;
  std::function<double(const Point&)> eval;
};

// A measure enters as an unnormalized nonnegative density generator; it is
// sampled on the chart and normalized to mass 1 where a field is needed, and
// evaluated directly where atoms or translated lattices are needed.
struct NamedMeasure {
  std::string name;
  std::function<double(const Point&)> density;
};

struct Scenario {
  std::string name;
  GroupModel model = GroupModel::abelian_box(2);
  GridChart chart;
  CurvatureFn curvature;
  std::vector<NamedFunction> functions;
  std::vector<NamedMeasure> measures;
  std::vector<double> time_grid;

  std::vector<double> s_grid = {0.25, 0.5, 0.75};
  std::vector<double> h_grid = {0.05, 0.1};
  std::vector<double> eps_list = {1.0, 0.1};
  std::vector<double> velocity_h = {0.02, 0.01};
  std::vector<double> harnack_times = {0.1, 0.25};
  std::vector<double> kernel_times = {0.05, 0.1};
  std::vector<double> heated_times = {0.0, 0.1};
  int harnack_pairs = 20;

  double window_margin = 0.2;
  double convolution_radius = 0.2;
  Point translation;  // horizontal direction of the right-translation curve

  ToleranceSpec tol;
  unsigned seed = 1;
  MetricOracle oracle;
  TransportOptions transport;
  EvolveOptions evolve;
  DeltaInit delta_init = DeltaInit::Cell;
};

// Throws std::invalid_argument on an inconsistent scenario (model/chart
// mismatch, non-increasing time grid, out-of-range tolerances, ...).
void validate_scenario(const Scenario& sc);

// Certifier registry in canonical (alphabetical) order.
const std::vector<std::string>& certifier_names();
std::vector<CertReport> run_certifier(const std::string& name,
                                      const Scenario& sc);

// Self-checks of the discrete calculus (chain rules, the action-derivative
// identity, the mollifier Laplacian identity). Meant to run, and pass, before
// any inequality certifier is trusted.
std::vector<CertReport> calculus_self_checks(const Scenario& sc);

// Pointwise gradient contraction Gamma(P_t f) <= c(t)^2 P_t Gamma(f) per
// (function, time), the estimated contraction modulus chat(t) (sup of the
// square-rooted ratio over reliable window nodes, maximized over functions),
// its submultiplicativity over grid pairs, and an exponential envelope fit.
// chat_out, when given, receives Tabulated chat with a (0, 1) knot prepended,
// ready to serve as the curvature function of the other certifiers.
std::vector<CertReport> certify_gradient_contraction(
    const Scenario& sc, CurvatureFn* chat_out = nullptr);

// W2 and W1 contraction of the dual flow for every measure pair and grid time.
std::vector<CertReport> certify_w_contraction(const Scenario& sc);

// Variance sandwich 2 I_{-2} Gamma(P_t f) <= Var <= 2 I_2 P_t Gamma(f), the
// sup-norm Lipschitz regularization bound, and Lipschitz propagation.
std::vector<CertReport> certify_variance_poincare(const Scenario& sc);

// P_t log(f+eps)(y) <= log(P_t f(x)+eps) + d(x,y)^2/(4 I_{-2}(t)) on sampled
// window pairs plus the diagonal Jensen pair.
std::vector<CertReport> certify_log_harnack(const Scenario& sc);

// Kernel lower bound p_{2t}(x) >= exp(-d(x,o)^2/(4 I_{-2}(t))) on every node,
// plus kernel symmetry. Requires a torus model of total measure 1; anything
// else yields a single degenerate "unsupported" report.
std::vector<CertReport> certify_kernel_lower_bound(const Scenario& sc);

// Entropy bounds along the flow: the L log L regularization bound (minimized
// over a radius sweep), second-moment growth, entropy monotonicity, and the
// integrated Fisher/moment bound.
std::vector<CertReport> certify_entropy_regularization(const Scenario& sc);

// W2-velocity of the heat-flow curve against Fisher information, speed
// non-increase under ball convolution of a geodesic curve, and the Lipschitz
// test-function velocity bound along that curve.
std::vector<CertReport> certify_velocity(const Scenario& sc);

// Evolution variational inequality with coefficient 1/(2 RI(t0, t1)) over
// diagonal and consecutive time pairs. Diagonal cases reproduce the W2
// contraction certificate through the identity RI(t, t) = c(t)^{-2}.
std::vector<CertReport> certify_evi(const Scenario& sc);

// Displacement convexity of the entropy after heating: the abelian geodesic
// comes from an exact coupling, the Heisenberg geodesic from right
// translations, which additionally certifies W2 = d(u, o), entropy constancy,
// the w(s) defect inequality, and the sigma bound.
std::vector<CertReport> certify_heated_convexity(const Scenario& sc);

// Canonical report order: stable sort by certifier name (case order within a
// certifier is already deterministic).
void sort_reports(std::vector<CertReport>& reports);

// One JSON object per report, NaN parameters rendered as null.
std::string reports_to_json(const std::vector<CertReport>& reports);

// Fixed columns: name, anchor, case, lhs, rhs, slack, tol, verdict, window,
// t, s, h, extra. NaN parameters render as empty cells; no field contains a
// comma, so no quoting is involved.
std::string reports_to_csv(const std::vector<CertReport>& reports);

}  // namespace cclab
