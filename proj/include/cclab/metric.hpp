#pragma once

#include <vector>

#include "cclab/group.hpp"

namespace cclab {

// How Carnot-Caratheodory distances are evaluated.
//
// ClosedForm solves the one-dimensional geodesic-parameter equation for the
// Heisenberg group by bracketed bisection (abelian families reduce to plain
// Euclidean or modular distances, where both methods coincide).
// HorizontalGraph runs Dijkstra on a lattice whose edges are short horizontal
// group translations; it is slower but makes no use of the closed form, so it
// serves as an independent cross-check.
struct MetricOracle {
  enum class Method { ClosedForm, HorizontalGraph };
  Method method = Method::ClosedForm;
  // Width of the final root bracket for the closed-form branch. Must lie in
  // (0, 1e-3]; the default is far tighter than required.
  double root_tolerance = 1e-12;
  // Lattice steps across the a-priori distance bound for the graph branch.
  // Must be >= 8.
  int graph_resolution = 32;
};

struct DistanceDiagnostics {
  bool used_graph_fallback = false;
};

// Left-invariant distance d(a, b) = d(o, a^{-1} b).
double cc_distance(const GroupModel& model, const Point& a, const Point& b,
                   const MetricOracle& oracle = {},
                   DistanceDiagnostics* diag = nullptr);

// Constant-speed sample of a length-minimizing curve from a to b.
// points.front() == a and points.back() == b (up to reduction); length is the
// sum of horizontal chord lengths of consecutive samples.
struct PathPolyline {
  std::vector<Point> points;
  double length = 0.0;
};

PathPolyline cc_geodesic(const GroupModel& model, const Point& a,
                         const Point& b, int samples,
                         const MetricOracle& oracle = {});

// Point at parameter s in [0, 1] along the constant-speed geodesic a -> b.
Point cc_geodesic_point(const GroupModel& model, const Point& a, const Point& b,
                        double s, const MetricOracle& oracle = {});

// Horizontal component of the group increment p^{-1} q. For nearby points this
// is the length of the connecting horizontal segment; polyline lengths are
// accumulated from it.
double horizontal_chord(const GroupModel& model, const Point& p,
                        const Point& q);

// Upper bound on d(o, g) that does not rely on the closed form: horizontal
// displacement plus a vertical detour. Used to size graph lattices.
double cc_distance_upper_bound(const GroupModel& model, const Point& g);

// Single-source shortest-path field on the horizontal step lattice of the
// Heisenberg group. Edges join p to p * (alpha h, beta h, 0) for sixteen
// integer directions (axis, diagonal and knight moves); the vertical spacing
// h^2/2 makes every drift land exactly on a lattice level, so the graph is
// built without interpolation. The field is computed once per source and may
// be queried for many targets within `radius` of it.
//
// For abelian families the lattice construction is skipped and queries return
// the exact Euclidean (or modular) distance.
class HorizontalGraphField {
 public:
  HorizontalGraphField(const GroupModel& model, const Point& source,
                       double radius, int resolution);

  // Distance from the source to the lattice node nearest `target`.
  // Throws std::domain_error if the target lies outside the covered box.
  double distance_to(const Point& target) const;

  long long node_count() const;
  double lattice_spacing() const { return h_; }

 private:
  GroupModel model_;
  Point source_;
  double radius_ = 0.0;
  double h_ = 0.0;
  double hz_ = 0.0;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  int cx_ = 0, cy_ = 0, cz_ = 0;
  std::vector<double> dist_;

  void run_dijkstra();
  long long index_of(int i, int j, int k) const {
    return (static_cast<long long>(k) * ny_ + j) * nx_ + i;
  }
};

}  // namespace cclab
