#include "cclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cclab {

long long GridChart::size() const {
  long long n = 1;
  for (int s : shape) n *= s;
  return n;
}

double GridChart::cell_volume() const {
  double v = 1.0;
  for (double s : spacing) v *= s;
  return v;
}

long long GridChart::flatten(const std::vector<int>& idx) const {
  long long flat = 0;
  for (int a = 0; a < dim(); ++a) flat = flat * shape[a] + idx[a];
  return flat;
}

void GridChart::unflatten(long long flat, std::vector<int>& idx) const {
  idx.resize(dim());
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % shape[a]);
    flat /= shape[a];
  }
}

Point GridChart::node(long long flat) const {
  Point p(dim());
  for (int a = dim() - 1; a >= 0; --a) {
    int i = static_cast<int>(flat % shape[a]);
    flat /= shape[a];
    p[a] = coord(a, i);
  }
  return p;
}

Point GridChart::node(const std::vector<int>& idx) const {
  Point p(dim());
  for (int a = 0; a < dim(); ++a) p[a] = coord(a, idx[a]);
  return p;
}

long long GridChart::nearest_node(const Point& p) const {
  if (static_cast<int>(p.size()) != dim()) {
    throw std::invalid_argument("nearest_node: dimension mismatch");
  }
  long long flat = 0;
  for (int a = 0; a < dim(); ++a) {
    double u = (p[a] - lo[a]) / spacing[a] - 0.5;
    long long i = std::llround(u);
    if (boundary == Boundary::Periodic) {
      i %= shape[a];
      if (i < 0) i += shape[a];
    } else {
      i = std::clamp<long long>(i, 0, shape[a] - 1);
    }
    flat = flat * shape[a] + i;
  }
  return flat;
}

void GridChart::nearest_node(const Point& p, std::vector<int>& idx) const {
  unflatten(nearest_node(p), idx);
}

bool GridChart::compatible(const GridChart& other) const {
  if (model.family != other.model.family || dim() != other.dim() ||
      boundary != other.boundary || shape != other.shape) {
    return false;
  }
  for (int a = 0; a < dim(); ++a) {
    if (std::fabs(lo[a] - other.lo[a]) > 1e-12 ||
        std::fabs(hi[a] - other.hi[a]) > 1e-12) {
      return false;
    }
  }
  return true;
}

GridChart make_chart(const GroupModel& model, std::vector<double> lo,
                     std::vector<double> hi, std::vector<int> shape,
                     Boundary boundary) {
  int d = model.dimension;
  if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d ||
      static_cast<int>(shape.size()) != d) {
    throw std::invalid_argument("make_chart: extent arrays must match dimension");
  }
  for (int a = 0; a < d; ++a) {
    if (!(hi[a] > lo[a])) throw std::invalid_argument("make_chart: hi must exceed lo");
    if (shape[a] < 2) throw std::invalid_argument("make_chart: shape must be >= 2");
  }
  if (model.family == Family::AbelianTorus) {
    if (boundary != Boundary::Periodic) {
      throw std::invalid_argument("make_chart: torus charts must be periodic");
    }
    for (int a = 0; a < d; ++a) {
      if (std::fabs((hi[a] - lo[a]) - model.periods[a]) > 1e-12) {
        throw std::invalid_argument("make_chart: torus chart must cover one period");
      }
    }
  }
  GridChart c;
  c.model = model;
  c.lo = std::move(lo);
  c.hi = std::move(hi);
  c.shape = std::move(shape);
  c.boundary = boundary;
  c.spacing.resize(d);
  for (int a = 0; a < d; ++a) c.spacing[a] = (c.hi[a] - c.lo[a]) / c.shape[a];
  return c;
}

GridChart torus_chart(const GroupModel& model, std::vector<int> shape) {
  if (model.family != Family::AbelianTorus) {
    throw std::invalid_argument("torus_chart: model is not a torus");
  }
  std::vector<double> lo(model.dimension, 0.0);
  std::vector<double> hi = model.periods;
  return make_chart(model, std::move(lo), std::move(hi), std::move(shape),
                    Boundary::Periodic);
}

double DensityField::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * chart.cell_volume();
}

ScalarField sample_scalar(const GridChart& chart,
                          const std::function<double(const Point&)>& f) {
  ScalarField out{chart, {}};
  long long n = chart.size();
  out.values.resize(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) out.values[static_cast<std::size_t>(i)] = f(chart.node(i));
  return out;
}

DensityField density_from_values(const GridChart& chart,
                                 std::vector<double> values, bool normalize) {
  if (static_cast<long long>(values.size()) != chart.size()) {
    throw std::invalid_argument("density_from_values: size mismatch");
  }
  double total = 0.0;
  for (double& v : values) {
    if (v < 0.0) v = 0.0;
    total += v;
  }
  if (!(total > 0.0)) throw std::invalid_argument("density must have positive mass");
  DensityField out{chart, std::move(values)};
  if (normalize) {
    double scale = 1.0 / (total * chart.cell_volume());
    for (double& v : out.values) v *= scale;
  }
  return out;
}

DensityField sample_density(const GridChart& chart,
                            const std::function<double(const Point&)>& f,
                            bool normalize) {
  long long n = chart.size();
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = f(chart.node(i));
  return density_from_values(chart, std::move(vals), normalize);
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.chart.cell_volume();
}

double integrate_against(const ScalarField& f, const DensityField& mu) {
  if (!f.chart.compatible(mu.chart)) {
    throw std::invalid_argument("integrate_against: chart mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * mu.values[i];
  return s * f.chart.cell_volume();
}

std::vector<long long> interior_window(const GridChart& chart, double margin) {
  if (!(margin >= 0.0) || margin >= 0.5) {
    throw std::invalid_argument("interior_window: margin must lie in [0, 0.5)");
  }
  int d = chart.dim();
  std::vector<int> lo_i(d), hi_i(d);
  for (int a = 0; a < d; ++a) {
    if (chart.boundary == Boundary::Periodic) {
      lo_i[a] = 0;
      hi_i[a] = chart.shape[a];
    } else {
      int trim = static_cast<int>(std::ceil(margin * chart.shape[a]));
      lo_i[a] = trim;
      hi_i[a] = chart.shape[a] - trim;
      if (lo_i[a] >= hi_i[a]) {
        throw std::invalid_argument("interior_window: margin removes all nodes");
      }
    }
  }
  std::vector<long long> out;
  std::vector<int> idx(lo_i);
  while (true) {
    out.push_back(chart.flatten(idx));
    int a = d - 1;
    while (a >= 0) {
      if (++idx[a] < hi_i[a]) break;
      idx[a] = lo_i[a];
      --a;
    }
    if (a < 0) break;
  }
  return out;
}

}  // namespace cclab
