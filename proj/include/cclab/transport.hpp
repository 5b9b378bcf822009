#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cclab/grid.hpp"
#include "cclab/measure.hpp"
#include "cclab/metric.hpp"

namespace cclab {

// Sparse coupling between two weighted point clouds. `flow[k]` moves mass
// between atom `from[k]` of the source and atom `to[k]` of the target.
struct TransportPlan {
  std::vector<int> from;
  std::vector<int> to;
  std::vector<double> flow;
  double cost = 0.0;

  std::size_t size() const { return flow.size(); }
};

struct TransportOptions {
  // Problems with at most lp_cap atoms per side are solved exactly by network
  // simplex; larger ones fall back to entropic regularization with rounding.
  int lp_cap = 400;
  // Target support size when aggregating a grid density into a point cloud.
  int atom_budget = 360;
  double support_threshold = 1e-12;
  // Annealing ladder for the entropic solver, as multiples of the mean cost.
  std::vector<double> anneal = {1.0, 0.3, 0.1, 0.03, 0.01, 0.003};
  int sinkhorn_max_iter = 4000;
  double sinkhorn_tol = 1e-9;
  MetricOracle oracle{};
};

// Result of coupling two measures: the clouds actually coupled (after any
// aggregation), the plan between them, and the squared-distance cost.
struct CloudPlan {
  PointCloudMeasure mu;
  PointCloudMeasure nu;
  TransportPlan plan;
  double cost2 = 0.0;
  bool exact = true;
};

// Exact minimum-cost coupling for a dense cost matrix (row-major, m x n).
// Weights must be balanced to the same total mass.
TransportPlan min_cost_plan(const std::vector<double>& mu,
                            const std::vector<double>& nu,
                            const std::vector<double>& cost, int m, int n);

// Entropic approximation with annealed regularization; the returned plan is
// rounded to satisfy both marginals exactly.
TransportPlan entropic_plan(const std::vector<double>& mu,
                            const std::vector<double>& nu,
                            const std::vector<double>& cost, int m, int n,
                            const TransportOptions& opt = {});

// Aggregate a grid density into a point cloud with at most opt.atom_budget
// atoms by merging blocks of cells; exact when the support is already small.
PointCloudMeasure grid_to_cloud(const DensityField& mu,
                                const TransportOptions& opt = {});

CloudPlan w2_plan(const PointCloudMeasure& mu, const PointCloudMeasure& nu,
                  const TransportOptions& opt = {});
CloudPlan w2_plan(const DensityField& mu, const DensityField& nu,
                  const TransportOptions& opt = {});

double w2_distance(const PointCloudMeasure& mu, const PointCloudMeasure& nu,
                   const TransportOptions& opt = {});
double w2_distance(const DensityField& mu, const DensityField& nu,
                   const TransportOptions& opt = {});

// First-order cost (plain distance instead of squared distance).
double w1_distance(const PointCloudMeasure& mu, const PointCloudMeasure& nu,
                   const TransportOptions& opt = {});
double w1_distance(const DensityField& mu, const DensityField& nu,
                   const TransportOptions& opt = {});

// Q_s phi (x) = min_y phi(y) + d(x, y)^2 / (2 s) over the sampled support.
double hopf_lax(const GroupModel& model, const std::vector<Point>& support,
                const std::vector<double>& phi, const Point& eval_at, double s,
                const MetricOracle& oracle = {});

// Value of the Kantorovich dual objective for potentials (psi, phi) that are
// feasible up to floating error: sum psi mu + sum phi nu.
double kantorovich_dual_value(const std::vector<double>& mu,
                              const std::vector<double>& nu,
                              const std::vector<double>& psi,
                              const std::vector<double>& phi);

// Coordinate-ascent on the dual: alternate c-transforms starting from phi = 0.
// Returns the dual value; potentials are written back if pointers are given.
double kantorovich_ascent(const std::vector<double>& mu,
                          const std::vector<double>& nu,
                          const std::vector<double>& cost, int m, int n,
                          int rounds = 64, std::vector<double>* psi_out = nullptr,
                          std::vector<double>* phi_out = nullptr);

// Push every coupled pair to the parameter-s point of the geodesic joining
// its endpoints. Atoms at coinciding endpoints stay put.
PointCloudMeasure displacement_interpolate(const CloudPlan& cp, double s,
                                           const MetricOracle& oracle = {});

// Convolve a point cloud with the normalized indicator of the cc-ball of
// radius r: each atom spreads uniformly over grid cells within distance r of
// its (right-translated) center.
DensityField convolve_measure(const PointCloudMeasure& mu,
                              const GridChart& chart, double r,
                              const MetricOracle& oracle = {});

// Smooth a curve of measures in space (ball convolution) and time (triangle
// kernel of half-width `eta` on the curve parameter). `curve[k]` sits at
// parameter k / (curve.size() - 1); the curve is extended as constant past
// the ends.
std::vector<DensityField> regularize_curve(
    const std::vector<PointCloudMeasure>& curve, const GridChart& chart,
    double r, double eta, int out_samples, const MetricOracle& oracle = {});

}  // namespace cclab
