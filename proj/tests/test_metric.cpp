#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cclab/metric.hpp"

using namespace cclab;

namespace {
constexpr double kPi = 3.14159265358979323846;

Point rnd_point(std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Point{u(rng), u(rng), u(rng)};
}
}  // namespace

TEST_CASE("abelian distances are euclidean / modular") {
  auto box = GroupModel::abelian_box(2);
  CHECK(cc_distance(box, {0.0, 0.0}, {3.0, 4.0}) == doctest::Approx(5.0).epsilon(1e-14));
  auto torus = GroupModel::abelian_torus({1.0, 1.0});
  CHECK(cc_distance(torus, {0.05, 0.5}, {0.95, 0.5}) ==
        doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("heisenberg closed-form anchors") {
  auto m = GroupModel::heisenberg1();
  Point o = identity(m);
  // Horizontal target: d = r.
  CHECK(cc_distance(m, o, {1.0, 0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
  // Vertical target: d = 2 sqrt(pi |z|).
  CHECK(cc_distance(m, o, {0.0, 0.0, 1.0}) ==
        doctest::Approx(2.0 * std::sqrt(kPi)).epsilon(1e-12));
  // Geodesic parameter exactly pi: z/r^2 = pi/8 gives d = r * pi / 2.
  CHECK(cc_distance(m, o, {1.0, 0.0, kPi / 8.0}) ==
        doctest::Approx(kPi / 2.0).epsilon(1e-9));
  // Geodesic parameter pi/2: z/r^2 = (pi/2 - 1)/4 gives d = pi / (2 sqrt 2).
  CHECK(cc_distance(m, o, {1.0, 0.0, (kPi / 2.0 - 1.0) / 4.0}) ==
        doctest::Approx(kPi / (2.0 * std::sqrt(2.0))).epsilon(1e-9));
}

TEST_CASE("heisenberg distance properties") {
  auto m = GroupModel::heisenberg1();
  Point o = identity(m);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    Point a = rnd_point(rng, 1.5), b = rnd_point(rng, 1.5), c = rnd_point(rng, 1.5);

    double dab = cc_distance(m, a, b);
    CHECK(dab >= 0.0);
    CHECK(cc_distance(m, b, a) == doctest::Approx(dab).epsilon(1e-9));
    // Left invariance.
    CHECK(cc_distance(m, multiply(m, c, a), multiply(m, c, b)) ==
          doctest::Approx(dab).epsilon(1e-9));
    // Triangle inequality.
    double dac = cc_distance(m, a, c), dcb = cc_distance(m, c, b);
    CHECK(dab <= dac + dcb + 1e-9);
    // Dilation homogeneity.
    double lam = 0.5 + 0.05 * trial;
    CHECK(cc_distance(m, o, dilate(m, lam, a)) ==
          doctest::Approx(lam * cc_distance(m, o, a)).epsilon(1e-9));
  }
}

TEST_CASE("geodesics hit endpoints at constant speed") {
  auto m = GroupModel::heisenberg1();
  Point o = identity(m);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    Point a = rnd_point(rng, 1.0), b = rnd_point(rng, 1.0);
    double d = cc_distance(m, a, b);
    if (d < 1e-6) continue;
    auto path = cc_geodesic(m, a, b, 64);
    REQUIRE(path.points.size() == 64);
    for (int i = 0; i < 3; ++i) {
      CHECK(path.points.front()[i] == doctest::Approx(a[i]).epsilon(1e-10));
      CHECK(path.points.back()[i] == doctest::Approx(b[i]).epsilon(1e-10));
    }
    CHECK(path.length == doctest::Approx(d).epsilon(0.02));
    // Chords of a constant-speed sample are equal up to curvature effects.
    double c0 = horizontal_chord(m, path.points[0], path.points[1]);
    double cm = horizontal_chord(m, path.points[30], path.points[31]);
    CHECK(c0 == doctest::Approx(cm).epsilon(0.05));
    // Midpoint splits the distance in half.
    const Point& mid = path.points[31];
    double half = cc_distance(m, a, mid) + cc_distance(m, mid, b);
    CHECK(half == doctest::Approx(d).epsilon(0.01));
  }
}

TEST_CASE("vertical geodesic closes the full circle") {
  auto m = GroupModel::heisenberg1();
  auto path = cc_geodesic(m, identity(m), {0.0, 0.0, 0.5}, 128);
  CHECK(path.points.back()[2] == doctest::Approx(0.5).epsilon(1e-12));
  double z_prev = -1.0;
  for (const auto& p : path.points) {
    CHECK(p[2] >= z_prev - 1e-12);  // swept area is monotone
    z_prev = p[2];
  }
  CHECK(path.length == doctest::Approx(2.0 * std::sqrt(kPi * 0.5)).epsilon(0.02));
}

TEST_CASE("graph oracle agrees with the closed form") {
  auto m = GroupModel::heisenberg1();
  Point o = identity(m);
  HorizontalGraphField field(m, o, 2.9, 32);
  Point targets[] = {
      {1.0, 0.0, 0.0},        {0.0, 1.0, 0.0},
      {0.6, 0.8, 0.0},        {0.0, 0.0, 0.5},
      {1.0, 0.0, kPi / 8.0},  {0.7, 0.7, 0.25},
      {0.5, -0.5, -0.3},      {-0.8, 0.3, 0.15},
  };
  for (const Point& g : targets) {
    double exact = cc_distance(m, o, g);
    double graph = field.distance_to(g);
    CHECK(std::fabs(graph - exact) / exact <= 0.05);
  }
}

TEST_CASE("cc_distance dispatches to the graph method") {
  auto m = GroupModel::heisenberg1();
  MetricOracle oracle;
  oracle.method = MetricOracle::Method::HorizontalGraph;
  oracle.graph_resolution = 16;
  double d = cc_distance(m, identity(m), {1.0, 0.0, 0.0}, oracle);
  CHECK(d == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("oracle parameter validation") {
  auto m = GroupModel::heisenberg1();
  MetricOracle bad;
  bad.root_tolerance = 1.0;
  CHECK_THROWS_AS(cc_distance(m, identity(m), {1.0, 0.0, 0.0}, bad),
                  std::invalid_argument);
  MetricOracle bad2;
  bad2.graph_resolution = 4;
  CHECK_THROWS_AS(cc_distance(m, identity(m), {1.0, 0.0, 0.0}, bad2),
                  std::invalid_argument);
}
