#pragma once

#include <cstdint>
#include <vector>

#include "cclab/grid.hpp"
#include "cclab/measure.hpp"

namespace cclab {

// Compressed sparse row matrix with int32 indices (layout shared with the
// SIMD spmv kernel).
struct Csr {
  int n = 0;
  std::vector<std::int32_t> rowptr, col;
  std::vector<double> val;

  void apply(const double* x, double* y) const;
  std::vector<double> diagonal() const;
};

// Discrete sublaplacian on a chart. Conductances follow the group-aligned
// stencil: for every horizontal direction the unit step p -> p * (h e_i) is
// split over the two lattice offsets bracketing its exact vertical drift,
// with convex weights. The result is a symmetric, mass-conserving generator
// with nonnegative off-diagonal rates (so the discrete maximum principle is
// exact), negative semidefinite by construction. Abelian models reduce to the
// standard compact Laplacian.
struct HeatOperator {
  GridChart chart;
  Csr lap;
  bool symmetrized = true;

  // Step budget for time integration: min(spacing)^2.
  double dt_limit() const;
};

HeatOperator assemble_heat_operator(const GridChart& chart);

ScalarField sublaplacian_apply(const HeatOperator& op, const ScalarField& f);

// Carre du champ Gamma(f, g) = sum_i (X_i f)(X_i g) where X_i are centered
// differences composed with the horizontal frame coefficients at each node
// (mirror ghosts at reflecting walls). right_invariant = true swaps in the
// right-invariant frame.
ScalarField carre_du_champ(const ScalarField& f, const ScalarField& g,
                           bool right_invariant = false);
ScalarField carre_du_champ(const ScalarField& f, bool right_invariant = false);

// Operator-level carre du champ (Delta(fg) - f Delta g - g Delta f) / 2,
// exact for the assembled generator; used by identity self-checks.
ScalarField operator_carre_du_champ(const HeatOperator& op,
                                    const ScalarField& f,
                                    const ScalarField& g);

struct EvolveOptions {
  // Step size; 0 means the operator's dt_limit. Larger values are honored
  // (the scheme is unconditionally stable); accuracy is the caller's call.
  double dt = 0.0;
  double cg_tol = 1e-10;        // relative residual target
  int cg_max_iter = 10000;
  // Backward Euler steps taken before switching to Crank-Nicolson; rough
  // initial data (point masses) needs a couple to stay positive.
  int startup_implicit_steps = 0;
};

// Runs the heat flow for time t: Crank-Nicolson steps of the configured size,
// each solved by Jacobi-preconditioned conjugate gradients. Mass is conserved
// to solver tolerance. Throws std::runtime_error if CG fails to converge.
ScalarField heat_evolve(const HeatOperator& op, const ScalarField& f, double t,
                        const EvolveOptions& opts = {});
DensityField heat_evolve_density(const HeatOperator& op, const DensityField& mu,
                                 double t, const EvolveOptions& opts = {});

enum class DeltaInit { Cell, Bump };

// Unit point mass deposited on the chart: either all mass in the nearest cell
// or a renormalized Gaussian bump of one-spacing standard deviation.
DensityField point_mass_density(const GridChart& chart, const Point& x0,
                                DeltaInit init = DeltaInit::Cell);

// Heat kernel p_t(x0, .) as a density field (two implicit startup steps keep
// the rough initial data nonnegative).
DensityField heat_kernel(const HeatOperator& op, const Point& x0, double t,
                         DeltaInit init = DeltaInit::Cell,
                         const EvolveOptions& opts = {});

// Dual heat flow applied to a finitely supported measure: deposits the atoms
// and runs one evolution.
DensityField dual_heat_on_measure(const HeatOperator& op,
                                  const PointCloudMeasure& mu, double t,
                                  DeltaInit init = DeltaInit::Cell,
                                  const EvolveOptions& opts = {});

// Smooth averaging kernel on [lo, hi] used by the semigroup mollifier;
// normalized so that its composite-Simpson quadrature sums to exactly 1.
class Mollifier {
 public:
  explicit Mollifier(double lo = 0.5, double hi = 1.0, int panels = 16);
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int panels() const { return panels_; }
  double k(double r) const;
  double dk(double r) const;

 private:
  double lo_, hi_;
  int panels_;
  double norm_ = 1.0;
  double raw(double r) const;
  double raw_d(double r) const;
};

// Semigroup mollification: integral of P_{eps r} f k(r) dr over the kernel
// support (composite Simpson, semigroup legs reused between nodes).
ScalarField mollify_semigroup(const HeatOperator& op, const ScalarField& f,
                              double eps, const Mollifier& kappa = Mollifier(),
                              const EvolveOptions& opts = {});

// Right-hand side of the mollifier Laplacian identity:
// (1/eps) * integral of P_{eps r} f k'(r) dr, which equals -Delta(mollified f).
ScalarField mollify_laplacian_rhs(const HeatOperator& op, const ScalarField& f,
                                  double eps,
                                  const Mollifier& kappa = Mollifier(),
                                  const EvolveOptions& opts = {});

}  // namespace cclab
