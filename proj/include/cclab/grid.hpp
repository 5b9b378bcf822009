#pragma once

#include <functional>
#include <vector>

#include "cclab/group.hpp"

namespace cclab {

enum class Boundary { Reflecting, Periodic };

// Uniform tensor grid of cell centers over a coordinate box. Node index
// (i_0, ..., i_{d-1}) sits at lo + (i + 1/2) * spacing, flattened row-major
// (last axis fastest). Torus models require a Periodic chart covering exactly
// one fundamental domain.
struct GridChart {
  GroupModel model;
  std::vector<double> lo, hi;
  std::vector<int> shape;
  std::vector<double> spacing;
  Boundary boundary = Boundary::Reflecting;

  int dim() const { return model.dimension; }
  long long size() const;
  double cell_volume() const;

  long long flatten(const std::vector<int>& idx) const;
  void unflatten(long long flat, std::vector<int>& idx) const;
  Point node(long long flat) const;
  Point node(const std::vector<int>& idx) const;
  double coord(int axis, int i) const { return lo[axis] + (i + 0.5) * spacing[axis]; }
  // Nearest cell center (coordinates clamped to the box; wrapped on a torus).
  long long nearest_node(const Point& p) const;
  void nearest_node(const Point& p, std::vector<int>& idx) const;

  bool compatible(const GridChart& other) const;
};

GridChart make_chart(const GroupModel& model, std::vector<double> lo,
                     std::vector<double> hi, std::vector<int> shape,
                     Boundary boundary);

// Chart covering the fundamental domain of a torus model.
GridChart torus_chart(const GroupModel& model, std::vector<int> shape);

struct ScalarField {
  GridChart chart;
  std::vector<double> values;
};

// Nonnegative field interpreted against the uniform volume measure; the mass
// is sum(values) * cell_volume.
struct DensityField {
  GridChart chart;
  std::vector<double> values;
  double mass() const;
};

ScalarField sample_scalar(const GridChart& chart,
                          const std::function<double(const Point&)>& f);

// Samples a nonnegative function as a density; tiny negative samples are
// clipped to zero. With normalize=true the result has mass exactly 1.
DensityField sample_density(const GridChart& chart,
                            const std::function<double(const Point&)>& f,
                            bool normalize = true);
DensityField density_from_values(const GridChart& chart,
                                 std::vector<double> values,
                                 bool normalize = true);

double integrate(const ScalarField& f);                      // sum * volume
double integrate_against(const ScalarField& f, const DensityField& mu);

// Flat indices of the nodes at least `margin` (fraction of each extent) away
// from every non-periodic wall. Periodic axes are never trimmed.
std::vector<long long> interior_window(const GridChart& chart, double margin);

}  // namespace cclab
