#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cclab/group.hpp"

using namespace cclab;

namespace {

Point random_point(const GroupModel& m, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Point p(m.dimension);
  for (double& x : p) x = u(rng);
  return reduce(m, p);
}

double max_abs_diff(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("heisenberg product picks up the area term") {
  auto m = GroupModel::heisenberg1();
  Point a{1.0, 2.0, 0.25};
  Point b{-0.5, 1.0, 1.0};
  Point ab = multiply(m, a, b);
  // z = 0.25 + 1.0 + (1*1 - 2*(-0.5))/2 = 2.25
  CHECK(ab[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ab[1] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(ab[2] == doctest::Approx(2.25).epsilon(1e-15));
}

TEST_CASE("group axioms hold to machine precision") {
  std::mt19937 rng(42);
  for (const auto& m : {GroupModel::abelian_box(2), GroupModel::heisenberg1()}) {
    for (int trial = 0; trial < 50; ++trial) {
      Point a = random_point(m, rng), b = random_point(m, rng), c = random_point(m, rng);
      Point lhs = multiply(m, multiply(m, a, b), c);
      Point rhs = multiply(m, a, multiply(m, b, c));
      CHECK(max_abs_diff(lhs, rhs) < 1e-14);
      CHECK(max_abs_diff(multiply(m, a, inverse(m, a)), identity(m)) < 1e-14);
      CHECK(max_abs_diff(multiply(m, a, identity(m)), a) < 1e-15);
    }
  }
}

TEST_CASE("torus reduction wraps coordinates") {
  auto m = GroupModel::abelian_torus({1.0, 2.0});
  Point p = reduce(m, Point{1.25, -0.5});
  CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(1.5).epsilon(1e-14));
  Point q = multiply(m, Point{0.75, 1.5}, Point{0.5, 1.0});
  CHECK(q[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(q[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("dilations are group homomorphisms with z scaling quadratically") {
  auto m = GroupModel::heisenberg1();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Point a = random_point(m, rng), b = random_point(m, rng);
    double lam = 0.3 + 0.1 * trial;
    Point lhs = dilate(m, lam, multiply(m, a, b));
    Point rhs = multiply(m, dilate(m, lam, a), dilate(m, lam, b));
    CHECK(max_abs_diff(lhs, rhs) < 1e-13);
  }
  Point d = dilate(m, 2.0, Point{1.0, -1.0, 0.5});
  CHECK(d[2] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS(dilate(GroupModel::abelian_torus({1.0}), 2.0, Point{0.5}));
}

TEST_CASE("frames carry the expected coefficients") {
  auto m = GroupModel::heisenberg1();
  Point p{0.4, -0.6, 0.1};
  auto left = horizontal_frame(m, p);
  CHECK(left[0][2] == doctest::Approx(0.3).epsilon(1e-15));   // -y/2
  CHECK(left[1][2] == doctest::Approx(0.2).epsilon(1e-15));   // x/2
  auto right = right_frame(m, p);
  CHECK(right[0][2] == doctest::Approx(-0.3).epsilon(1e-15)); // +y/2
  CHECK(right[1][2] == doctest::Approx(-0.2).epsilon(1e-15)); // -x/2
}

TEST_CASE("homogeneous dimension is recorded") {
  CHECK(GroupModel::heisenberg1().homogeneous_dimension == 4);
  CHECK(GroupModel::abelian_box(2).homogeneous_dimension == 2);
}
