#include "cclab/group.hpp"

#include <cmath>
#include <stdexcept>

namespace cclab {

namespace {

void check_point(const GroupModel& m, const Point& a) {
  if (static_cast<int>(a.size()) != m.dimension)
    throw std::invalid_argument("point dimension does not match model");
}

double wrap(double x, double p) {
  double r = std::fmod(x, p);
  if (r < 0) r += p;
  return r;
}

}  // namespace

GroupModel GroupModel::abelian_box(int n) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  return {Family::AbelianBox, n, 1, n, {}};
}

GroupModel GroupModel::abelian_torus(std::vector<double> periods) {
  const int n = static_cast<int>(periods.size());
  if (n < 1) throw std::invalid_argument("torus needs at least one period");
  for (double p : periods)
    if (!(p > 0)) throw std::invalid_argument("torus periods must be positive");
  return {Family::AbelianTorus, n, 1, n, std::move(periods)};
}

GroupModel GroupModel::heisenberg1() {
  // n = 3, step 2, homogeneous dimension Q = 1*2 + 2*1 = 4
  return {Family::Heisenberg1, 3, 2, 4, {}};
}

const char* GroupModel::family_name() const {
  switch (family) {
    case Family::AbelianBox: return "abelian_box";
    case Family::AbelianTorus: return "abelian_torus";
    case Family::Heisenberg1: return "heisenberg1";
  }
  return "?";
}

Point identity(const GroupModel& m) { return Point(m.dimension, 0.0); }

Point reduce(const GroupModel& m, Point a) {
  check_point(m, a);
  if (m.family == Family::AbelianTorus)
    for (int i = 0; i < m.dimension; ++i) a[i] = wrap(a[i], m.periods[i]);
  return a;
}

Point multiply(const GroupModel& m, const Point& a, const Point& b) {
  check_point(m, a);
  check_point(m, b);
  Point r(m.dimension);
  for (int i = 0; i < m.dimension; ++i) r[i] = a[i] + b[i];
  if (m.family == Family::Heisenberg1)
    r[2] = a[2] + b[2] + 0.5 * (a[0] * b[1] - a[1] * b[0]);
  return reduce(m, std::move(r));
}

Point inverse(const GroupModel& m, const Point& a) {
  check_point(m, a);
  Point r(m.dimension);
  for (int i = 0; i < m.dimension; ++i) r[i] = -a[i];
  return reduce(m, std::move(r));
}

Point dilate(const GroupModel& m, double lambda, const Point& a) {
  check_point(m, a);
  if (lambda < 0) throw std::invalid_argument("dilation factor must be >= 0");
  if (m.family == Family::AbelianTorus)
    throw std::domain_error("dilations are undefined on the torus");
  Point r(m.dimension);
  for (int i = 0; i < m.dimension; ++i) r[i] = lambda * a[i];
  if (m.family == Family::Heisenberg1) r[2] = lambda * lambda * a[2];
  return r;
}

std::vector<Point> horizontal_frame(const GroupModel& m, const Point& a) {
  check_point(m, a);
  if (m.family == Family::Heisenberg1)
    return {Point{1.0, 0.0, -0.5 * a[1]}, Point{0.0, 1.0, 0.5 * a[0]}};
  std::vector<Point> frame(m.dimension, Point(m.dimension, 0.0));
  for (int i = 0; i < m.dimension; ++i) frame[i][i] = 1.0;
  return frame;
}

std::vector<Point> right_frame(const GroupModel& m, const Point& a) {
  check_point(m, a);
  if (m.family == Family::Heisenberg1)
    return {Point{1.0, 0.0, 0.5 * a[1]}, Point{0.0, 1.0, -0.5 * a[0]}};
  return horizontal_frame(m, a);
}

}  // namespace cclab
