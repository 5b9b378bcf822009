#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "cclab/grid.hpp"
#include "cclab/io.hpp"
#include "cclab/transport.hpp"

using namespace cclab;

namespace {

std::string tmp_path(const char* stem) {
  return std::string("io_test_") + stem + ".bin";
}

}  // namespace

TEST_CASE("format_double round-trips through strtod") {
  const double values[] = {0.0,      1.0,       -1.0,        0.1,
                           1.0 / 3.0, 2.5e17,   -3.25e-12,   1e-300,
                           6.02214076e23, 3.14159265358979323846};
  for (double v : values) {
    std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("binary field snapshots round-trip exactly") {
  auto model = GroupModel::abelian_box(2);
  auto chart = make_chart(model, {-2.0, -1.0}, {2.0, 3.0}, {12, 9},
                          Boundary::Reflecting);
  DensityField mu = sample_density(
      chart, [](const Point& p) { return std::exp(-p[0] * p[0] - p[1] * p[1]); },
      true);
  std::string path = tmp_path("box");
  write_field_binary(path, mu);
  DensityField back = read_field_binary(path, model);
  std::remove(path.c_str());

  REQUIRE(back.chart.shape == chart.shape);
  CHECK(back.chart.lo == chart.lo);
  CHECK(back.chart.hi == chart.hi);
  CHECK(back.chart.boundary == Boundary::Reflecting);
  REQUIRE(back.values.size() == mu.values.size());
  for (std::size_t i = 0; i < mu.values.size(); ++i) {
    CHECK(back.values[i] == mu.values[i]);
  }
}

TEST_CASE("torus snapshots restore the periodic chart") {
  auto model = GroupModel::abelian_torus({1.0, 1.0});
  auto chart = torus_chart(model, {8, 8});
  DensityField mu = sample_density(
      chart,
      [](const Point& p) {
        return 1.0 + 0.25 * std::cos(2.0 * M_PI * p[0]);
      },
      true);
  std::string path = tmp_path("torus");
  write_field_binary(path, mu);
  DensityField back = read_field_binary(path, model);
  std::remove(path.c_str());
  CHECK(back.chart.boundary == Boundary::Periodic);
  CHECK(back.values == mu.values);
}

TEST_CASE("read rejects foreign or truncated files") {
  std::string path = tmp_path("bad");
  write_text_file(path, "not a snapshot");
  CHECK_THROWS_AS(read_field_binary(path, GroupModel::abelian_box(2)),
                  std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("csv writers emit fixed headers and one row per entry") {
  auto model = GroupModel::abelian_box(2);
  auto chart = make_chart(model, {0.0, 0.0}, {1.0, 1.0}, {2, 2},
                          Boundary::Reflecting);
  std::string path = tmp_path("csv");

  write_field_csv(path, chart, {1.0, 2.0, 3.0, 4.0});
  {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::getline(in, line);
    CHECK(line == "x0,x1,value");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4);
  }

  TransportPlan plan;
  plan.from = {0, 1};
  plan.to = {1, 0};
  plan.flow = {0.5, 0.5};
  plan.cost = 0.5;
  write_plan_csv(path, plan);
  {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::getline(in, line);
    CHECK(line == "i,j,mass");
    std::getline(in, line);
    CHECK(line == "0,1,0.5");
  }

  PointCloudMeasure mu = make_cloud(model, {{0.25, 0.5}, {0.75, 0.5}},
                                    {0.5, 0.5}, false);
  write_measure_csv(path, mu);
  {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::getline(in, line);
    CHECK(line == "x0,x1,weight");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2);
  }
  std::remove(path.c_str());
}
