#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cclab/kernels.hpp"

using namespace cclab;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("backend reports a name") {
  const char* name = kern::backend_name();
  CHECK((std::string(name) == "scalar" || std::string(name) == "avx2"));
}

TEST_CASE("dot frozen value") {
  // sum of i * (i + 0.5) for i = 0..9 = 307.5
  std::vector<double> a(10), b(10);
  for (int i = 0; i < 10; ++i) {
    a[i] = i;
    b[i] = i + 0.5;
  }
  CHECK(kern::dot(a.data(), b.data(), 10) == doctest::Approx(307.5).epsilon(1e-15));
}

TEST_CASE("scalar and avx2 backends agree") {
  const auto& sc = kern::detail::scalar_backend();
  const auto& vx = kern::detail::avx2_backend();
  if (!kern::simd_active()) return;  // machine without AVX2: nothing to compare

  for (std::size_t n : {1u, 7u, 8u, 33u, 1000u, 4097u}) {
    auto a = random_vec(n, 11u + static_cast<unsigned>(n));
    auto b = random_vec(n, 29u + static_cast<unsigned>(n));

    CHECK(sc.dot(a.data(), b.data(), n) ==
          doctest::Approx(vx.dot(a.data(), b.data(), n)).epsilon(1e-13));
    CHECK(sc.sum(a.data(), n) ==
          doctest::Approx(vx.sum(a.data(), n)).epsilon(1e-13));

    auto y1 = b, y2 = b;
    sc.axpy(0.37, a.data(), y1.data(), n);
    vx.axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

    y1 = b;
    y2 = b;
    sc.xpby(a.data(), -0.8, y1.data(), n);
    vx.xpby(a.data(), -0.8, y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));
  }
}

TEST_CASE("csr spmv backends agree on a banded matrix") {
  const int n = 500;
  std::vector<std::int32_t> rowptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int r = 0; r < n; ++r) {
    for (int d = -3; d <= 3; ++d) {
      int c = r + d;
      if (c < 0 || c >= n) continue;
      col.push_back(c);
      val.push_back(u(rng));
    }
    rowptr.push_back(static_cast<std::int32_t>(col.size()));
  }
  auto x = random_vec(n, 99);
  std::vector<double> y1(n), y2(n);
  kern::detail::scalar_backend().csr_spmv(rowptr.data(), col.data(), val.data(), n,
                                          x.data(), y1.data());
  if (kern::simd_active()) {
    kern::detail::avx2_backend().csr_spmv(rowptr.data(), col.data(), val.data(), n,
                                          x.data(), y2.data());
    for (int i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));
  }
}
