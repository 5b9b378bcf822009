#include "cclab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

namespace cclab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_oracle(const MetricOracle& oracle) {
  if (!(oracle.root_tolerance > 0.0) || oracle.root_tolerance > 1e-3) {
    throw std::invalid_argument("MetricOracle.root_tolerance must lie in (0, 1e-3]");
  }
  if (oracle.graph_resolution < 8) {
    throw std::invalid_argument("MetricOracle.graph_resolution must be >= 8");
  }
}

double abelian_distance(const GroupModel& model, const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < model.dimension; ++i) {
    double d = b[i] - a[i];
    if (model.family == Family::AbelianTorus) {
      double p = model.periods[i];
      d = std::fabs(std::remainder(d, p));
    }
    s += d * d;
  }
  return std::sqrt(s);
}

// F(theta) = (theta - sin theta) / (8 sin^2(theta/2)), strictly increasing on
// (0, 2*pi) with F -> 0 at 0 and F -> +inf at 2*pi. The geodesic parameter for
// target (x, y, z), r = hypot(x, y), solves F(theta) = |z| / r^2.
double geodesic_parameter_fn(double theta) {
  double s = std::sin(0.5 * theta);
  return (theta - std::sin(theta)) / (8.0 * s * s);
}

// Solves F(theta) = ratio on (0, 2*pi) by bisection to the requested bracket
// width. Returns a negative value if the bracket is invalid (NaN inputs).
double solve_geodesic_parameter(double ratio, double tol) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) return -1.0;
  double lo = 1e-14;
  double hi = 2.0 * kPi - 1e-12;
  if (geodesic_parameter_fn(hi) < ratio) return hi;
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (geodesic_parameter_fn(mid) < ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// d(o, (x, y, z)) on the first Heisenberg group. Returns NaN only if the root
// solve fails, in which case the caller falls back to the graph oracle.
double heisenberg_distance_origin(double x, double y, double z, double tol) {
  double r = std::hypot(x, y);
  double az = std::fabs(z);
  if (az == 0.0) return r;
  if (r * r * 1e16 < az) return 2.0 * std::sqrt(kPi * az);
  double ratio = az / (r * r);
  double theta = solve_geodesic_parameter(ratio, tol);
  if (theta <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (theta < 1e-7) return r;  // flat regime, d = r to machine accuracy
  return r * theta / (2.0 * std::sin(0.5 * theta));
}

}  // namespace

double cc_distance_upper_bound(const GroupModel& model, const Point& g) {
  if (model.family != Family::Heisenberg1) {
    return abelian_distance(model, identity(model), g);
  }
  return std::hypot(g[0], g[1]) + 2.0 * std::sqrt(kPi * std::fabs(g[2]));
}

double horizontal_chord(const GroupModel& model, const Point& p, const Point& q) {
  if (model.family != Family::Heisenberg1) {
    return abelian_distance(model, p, q);
  }
  Point xi = multiply(model, inverse(model, p), q);
  return std::hypot(xi[0], xi[1]);
}

double cc_distance(const GroupModel& model, const Point& a, const Point& b,
                   const MetricOracle& oracle, DistanceDiagnostics* diag) {
  check_oracle(oracle);
  if (model.family != Family::Heisenberg1) {
    return abelian_distance(model, a, b);
  }
  Point g = multiply(model, inverse(model, a), b);
  if (oracle.method == MetricOracle::Method::ClosedForm) {
    double d = heisenberg_distance_origin(g[0], g[1], g[2], oracle.root_tolerance);
    if (std::isfinite(d)) return d;
    if (diag) diag->used_graph_fallback = true;
  }
  double radius = std::max(cc_distance_upper_bound(model, g), 1e-12);
  HorizontalGraphField field(model, identity(model), 1.02 * radius,
                             oracle.graph_resolution);
  return field.distance_to(g);
}

namespace {

PathPolyline finish_polyline(const GroupModel& model, std::vector<Point> pts) {
  PathPolyline out;
  out.points = std::move(pts);
  for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
    out.length += horizontal_chord(model, out.points[i], out.points[i + 1]);
  }
  return out;
}

PathPolyline abelian_geodesic(const GroupModel& model, const Point& a,
                              const Point& b, int samples) {
  Point delta(model.dimension);
  for (int i = 0; i < model.dimension; ++i) {
    double d = b[i] - a[i];
    if (model.family == Family::AbelianTorus) {
      d = std::remainder(d, model.periods[i]);
    }
    delta[i] = d;
  }
  std::vector<Point> pts;
  pts.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    double t = static_cast<double>(k) / (samples - 1);
    Point p(model.dimension);
    for (int i = 0; i < model.dimension; ++i) p[i] = a[i] + t * delta[i];
    pts.push_back(reduce(model, p));
  }
  return finish_polyline(model, std::move(pts));
}

// Unit-speed geodesic of the Heisenberg group from the origin to
// g = (x, y, z), sampled uniformly in time. The horizontal projection is a
// circular arc p(t) = c (e^{i phi t} - 1) / (i phi) with c the initial
// horizontal velocity and phi the (signed) curvature; the vertical component
// is the swept area z(t) = |c|^2 (phi t - sin(phi t)) / (2 phi^2).
std::vector<Point> heisenberg_origin_geodesic(double x, double y, double z,
                                              double tol, int samples) {
  using cd = std::complex<double>;
  std::vector<Point> pts;
  pts.reserve(samples);
  double r = std::hypot(x, y);
  double az = std::fabs(z);
  double sign = (z >= 0.0) ? 1.0 : -1.0;

  if (az <= 1e-15 * std::max(1.0, r * r)) {
    for (int k = 0; k < samples; ++k) {
      double t = static_cast<double>(k) / (samples - 1);
      pts.push_back({t * x, t * y, t * z});
    }
    return pts;
  }

  double theta, T;
  cd c;
  if (r * r * 1e16 < az) {
    theta = 2.0 * kPi * sign;
    T = 2.0 * std::sqrt(kPi * az);
    c = cd(1.0, 0.0);
  } else {
    double th = solve_geodesic_parameter(az / (r * r), tol);
    theta = th * sign;
    T = r * th / (2.0 * std::sin(0.5 * th));
    double phi = theta / T;
    c = cd(x, y) * cd(0.0, phi) / (std::exp(cd(0.0, theta)) - 1.0);
  }
  double phi = theta / T;
  double c2 = std::norm(c);
  for (int k = 0; k < samples; ++k) {
    double t = T * static_cast<double>(k) / (samples - 1);
    cd p = c * (std::exp(cd(0.0, phi * t)) - 1.0) / cd(0.0, phi);
    double zt = c2 * (phi * t - std::sin(phi * t)) / (2.0 * phi * phi);
    pts.push_back({p.real(), p.imag(), zt});
  }
  pts.back() = {x, y, z};
  return pts;
}

}  // namespace

PathPolyline cc_geodesic(const GroupModel& model, const Point& a,
                         const Point& b, int samples,
                         const MetricOracle& oracle) {
  check_oracle(oracle);
  if (samples < 2) throw std::invalid_argument("cc_geodesic requires samples >= 2");
  if (model.family != Family::Heisenberg1) {
    return abelian_geodesic(model, a, b, samples);
  }
  Point g = multiply(model, inverse(model, a), b);
  std::vector<Point> local =
      heisenberg_origin_geodesic(g[0], g[1], g[2], oracle.root_tolerance, samples);
  std::vector<Point> pts;
  pts.reserve(local.size());
  for (const Point& p : local) pts.push_back(multiply(model, a, p));
  return finish_polyline(model, std::move(pts));
}

Point cc_geodesic_point(const GroupModel& model, const Point& a, const Point& b,
                        double s, const MetricOracle& oracle) {
  if (s < 0.0 || s > 1.0) {
    throw std::invalid_argument("cc_geodesic_point: s outside [0, 1]");
  }
  if (s == 0.0) return reduce(model, a);
  if (s == 1.0) return reduce(model, b);
  if (model.family != Family::Heisenberg1) {
    Point p(model.dimension);
    for (int i = 0; i < model.dimension; ++i) {
      double d = b[i] - a[i];
      if (model.family == Family::AbelianTorus) d = std::remainder(d, model.periods[i]);
      p[i] = a[i] + s * d;
    }
    return reduce(model, p);
  }
  check_oracle(oracle);
  Point g = multiply(model, inverse(model, a), b);
  using cd = std::complex<double>;
  double r = std::hypot(g[0], g[1]);
  double az = std::fabs(g[2]);
  double sign = (g[2] >= 0.0) ? 1.0 : -1.0;
  Point local(3);
  if (az <= 1e-15 * std::max(1.0, r * r)) {
    local = {s * g[0], s * g[1], s * g[2]};
  } else {
    double theta, T;
    cd c;
    if (r * r * 1e16 < az) {
      theta = 2.0 * kPi * sign;
      T = 2.0 * std::sqrt(kPi * az);
      c = cd(1.0, 0.0);
    } else {
      double th = solve_geodesic_parameter(az / (r * r), oracle.root_tolerance);
      theta = th * sign;
      T = r * th / (2.0 * std::sin(0.5 * th));
      double phi0 = theta / T;
      c = cd(g[0], g[1]) * cd(0.0, phi0) / (std::exp(cd(0.0, theta)) - 1.0);
    }
    double phi = theta / T, t = s * T;
    cd p = c * (std::exp(cd(0.0, phi * t)) - 1.0) / cd(0.0, phi);
    double zt = std::norm(c) * (phi * t - std::sin(phi * t)) / (2.0 * phi * phi);
    local = {p.real(), p.imag(), zt};
  }
  return multiply(model, a, local);
}

// Sixteen horizontal step directions: axes, diagonals and knight moves. The
// knight moves shrink the worst-case angular gap between available headings to
// ~18 degrees, which keeps the metric distortion of lattice paths under the
// oracle agreement budget.
namespace {
constexpr int kDirs[16][2] = {
    {1, 0},  {-1, 0}, {0, 1},  {0, -1}, {1, 1},   {1, -1},  {-1, 1},  {-1, -1},
    {2, 1},  {2, -1}, {-2, 1}, {-2, -1}, {1, 2},  {1, -2},  {-1, 2},  {-1, -2}};
}

HorizontalGraphField::HorizontalGraphField(const GroupModel& model,
                                           const Point& source, double radius,
                                           int resolution)
    : model_(model), source_(source), radius_(radius) {
  if (resolution < 8) {
    throw std::invalid_argument("HorizontalGraphField resolution must be >= 8");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("HorizontalGraphField radius must be positive");
  }
  if (model.family != Family::Heisenberg1) return;

  h_ = radius / resolution;
  hz_ = 0.5 * h_ * h_;
  // Any point within cc-distance `radius` of the source has horizontal
  // displacement at most radius and vertical displacement at most
  // radius^2 / (4 pi) (the isoperimetric extreme). Padding absorbs lattice
  // slack of near-optimal discrete paths.
  double half_xy = 1.05 * radius + 2.0 * h_;
  double half_z = 1.10 * radius * radius / (4.0 * kPi) + 4.0 * hz_;
  cx_ = static_cast<int>(std::ceil(half_xy / h_));
  cy_ = cx_;
  cz_ = static_cast<int>(std::ceil(half_z / hz_));
  nx_ = 2 * cx_ + 1;
  ny_ = 2 * cy_ + 1;
  nz_ = 2 * cz_ + 1;
  long long total = static_cast<long long>(nx_) * ny_ * nz_;
  if (total > 80'000'000LL) {
    throw std::runtime_error(
        "HorizontalGraphField lattice too large; reduce radius or resolution");
  }
  dist_.assign(static_cast<std::size_t>(total),
               std::numeric_limits<double>::infinity());
  run_dijkstra();
}

long long HorizontalGraphField::node_count() const {
  return static_cast<long long>(dist_.size());
}

void HorizontalGraphField::run_dijkstra() {
  double weight[16];
  for (int d = 0; d < 16; ++d) {
    weight[d] = h_ * std::hypot(static_cast<double>(kDirs[d][0]),
                                static_cast<double>(kDirs[d][1]));
  }
  using Item = std::pair<double, long long>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  long long start = index_of(cx_, cy_, cz_);
  dist_[static_cast<std::size_t>(start)] = 0.0;
  pq.push({0.0, start});
  while (!pq.empty()) {
    auto [d, idx] = pq.top();
    pq.pop();
    if (d > dist_[static_cast<std::size_t>(idx)]) continue;
    int i = static_cast<int>(idx % nx_);
    int j = static_cast<int>((idx / nx_) % ny_);
    int k = static_cast<int>(idx / (static_cast<long long>(nx_) * ny_));
    int gi = i - cx_, gj = j - cy_;
    for (int dir = 0; dir < 16; ++dir) {
      int alpha = kDirs[dir][0], beta = kDirs[dir][1];
      int ni = i + alpha, nj = j + beta;
      if (ni < 0 || ni >= nx_ || nj < 0 || nj >= ny_) continue;
      // Exact group step: drift (x beta - y alpha) h / 2 is an integer number
      // of z-levels because hz = h^2 / 2.
      int nk = k + gi * beta - gj * alpha;
      if (nk < 0 || nk >= nz_) continue;
      long long nidx = index_of(ni, nj, nk);
      double nd = d + weight[dir];
      if (nd < dist_[static_cast<std::size_t>(nidx)]) {
        dist_[static_cast<std::size_t>(nidx)] = nd;
        pq.push({nd, nidx});
      }
    }
  }
}

double HorizontalGraphField::distance_to(const Point& target) const {
  if (model_.family != Family::Heisenberg1) {
    return abelian_distance(model_, source_, target);
  }
  Point g = multiply(model_, inverse(model_, source_), target);
  int i = cx_ + static_cast<int>(std::lround(g[0] / h_));
  int j = cy_ + static_cast<int>(std::lround(g[1] / h_));
  int k = cz_ + static_cast<int>(std::lround(g[2] / hz_));
  if (i < 0 || i >= nx_ || j < 0 || j >= ny_ || k < 0 || k >= nz_) {
    throw std::domain_error("HorizontalGraphField: target outside covered box");
  }
  double d = dist_[static_cast<std::size_t>(index_of(i, j, k))];
  if (!std::isfinite(d)) {
    throw std::domain_error("HorizontalGraphField: target not reached");
  }
  return d;
}

}  // namespace cclab
