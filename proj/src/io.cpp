#include "cclab/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cclab {

namespace {

constexpr char kMagic[4] = {'C', 'C', 'L', 'B'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (v != v) return "nan";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_field_binary(const std::string& path, const GridChart& chart,
                        const std::vector<double>& values) {
  if (static_cast<long long>(values.size()) != chart.size()) {
    throw std::invalid_argument("write_field_binary: value count does not match chart");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_field_binary: cannot open " + path);
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(chart.dim()));
  for (int a = 0; a < chart.dim(); ++a) {
    put_u32(os, static_cast<std::uint32_t>(chart.shape[a]));
    put_f64(os, chart.lo[a]);
    put_f64(os, chart.hi[a]);
  }
  for (double v : values) put_f64(os, v);
  if (!os) throw std::runtime_error("write_field_binary: write failed for " + path);
}

void write_field_binary(const std::string& path, const DensityField& f) {
  write_field_binary(path, f.chart, f.values);
}

void write_field_binary(const std::string& path, const ScalarField& f) {
  write_field_binary(path, f.chart, f.values);
}

DensityField read_field_binary(const std::string& path, const GroupModel& model) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field_binary: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("read_field_binary: bad magic in " + path);
  }
  std::uint32_t version = get_u32(is);
  if (version != kVersion) {
    throw std::runtime_error("read_field_binary: unsupported version in " + path);
  }
  std::uint32_t dim = get_u32(is);
  if (static_cast<int>(dim) != model.dimension) {
    throw std::runtime_error("read_field_binary: dimension mismatch in " + path);
  }
  std::vector<int> shape(dim);
  std::vector<double> lo(dim), hi(dim);
  long long total = 1;
  for (std::uint32_t a = 0; a < dim; ++a) {
    shape[a] = static_cast<int>(get_u32(is));
    lo[a] = get_f64(is);
    hi[a] = get_f64(is);
    total *= shape[a];
  }
  if (!is) throw std::runtime_error("read_field_binary: truncated header in " + path);
  std::vector<double> values(static_cast<std::size_t>(total));
  for (auto& v : values) v = get_f64(is);
  if (!is) throw std::runtime_error("read_field_binary: truncated payload in " + path);
  Boundary b = model.family == Family::AbelianTorus ? Boundary::Periodic
                                                    : Boundary::Reflecting;
  GridChart chart = make_chart(model, std::move(lo), std::move(hi),
                               std::move(shape), b);
  return DensityField{std::move(chart), std::move(values)};
}

void write_field_csv(const std::string& path, const GridChart& chart,
                     const std::vector<double>& values) {
  if (static_cast<long long>(values.size()) != chart.size()) {
    throw std::invalid_argument("write_field_csv: value count does not match chart");
  }
  std::ostringstream os;
  for (int a = 0; a < chart.dim(); ++a) os << 'x' << a << ',';
  os << "value\n";
  std::vector<int> idx(chart.dim(), 0);
  for (long long flat = 0; flat < chart.size(); ++flat) {
    chart.unflatten(flat, idx);
    for (int a = 0; a < chart.dim(); ++a) {
      os << format_double(chart.coord(a, idx[a])) << ',';
    }
    os << format_double(values[static_cast<std::size_t>(flat)]) << '\n';
  }
  write_text_file(path, os.str());
}

void write_plan_csv(const std::string& path, const TransportPlan& plan) {
  std::ostringstream os;
  os << "i,j,mass\n";
  for (std::size_t k = 0; k < plan.size(); ++k) {
    os << plan.from[k] << ',' << plan.to[k] << ','
       << format_double(plan.flow[k]) << '\n';
  }
  write_text_file(path, os.str());
}

void write_measure_csv(const std::string& path, const PointCloudMeasure& mu) {
  std::ostringstream os;
  for (int a = 0; a < mu.model.dimension; ++a) os << 'x' << a << ',';
  os << "weight\n";
  for (std::size_t k = 0; k < mu.size(); ++k) {
    for (int a = 0; a < mu.model.dimension; ++a) {
      os << format_double(mu.points[k][a]) << ',';
    }
    os << format_double(mu.weights[k]) << '\n';
  }
  write_text_file(path, os.str());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_text_file: cannot open " + path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw std::runtime_error("write_text_file: write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_text_file: cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace cclab
