#pragma once

#include <vector>

#include "cclab/group.hpp"

namespace cclab {

// Finitely supported measure: weighted atoms at group points. Weights are
// strictly positive; duplicate atoms are merged at construction.
struct PointCloudMeasure {
  GroupModel model;
  std::vector<Point> points;
  std::vector<double> weights;

  double mass() const;
  std::size_t size() const { return points.size(); }
};

// Builds a cloud from raw atoms: reduces coordinates, merges exact duplicate
// points, drops non-positive weights, and (by default) normalizes to mass 1.
PointCloudMeasure make_cloud(const GroupModel& model, std::vector<Point> points,
                             std::vector<double> weights, bool normalize = true);

}  // namespace cclab
