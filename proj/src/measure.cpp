#include "cclab/measure.hpp"

#include <map>
#include <stdexcept>

namespace cclab {

double PointCloudMeasure::mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

PointCloudMeasure make_cloud(const GroupModel& model, std::vector<Point> points,
                             std::vector<double> weights, bool normalize) {
  if (points.size() != weights.size()) {
    throw std::invalid_argument("make_cloud: points/weights size mismatch");
  }
  std::map<Point, double> merged;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(weights[i] > 0.0)) continue;
    merged[reduce(model, points[i])] += weights[i];
  }
  if (merged.empty()) {
    throw std::invalid_argument("make_cloud: no atoms with positive weight");
  }
  PointCloudMeasure mu{model, {}, {}};
  mu.points.reserve(merged.size());
  mu.weights.reserve(merged.size());
  double total = 0.0;
  for (const auto& [p, w] : merged) {
    mu.points.push_back(p);
    mu.weights.push_back(w);
    total += w;
  }
  if (normalize) {
    for (double& w : mu.weights) w /= total;
  }
  return mu;
}

}  // namespace cclab
