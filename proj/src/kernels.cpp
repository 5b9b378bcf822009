#include "cclab/kernels.hpp"

#include <cstdlib>

namespace cclab::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby_scalar(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sum_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

void csr_spmv_scalar(const std::int32_t* rowptr, const std::int32_t* col,
                     const double* val, std::size_t nrows,
                     const double* x, double* y) {
  for (std::size_t r = 0; r < nrows; ++r) {
    double s = 0.0;
    for (std::int32_t j = rowptr[r]; j < rowptr[r + 1]; ++j)
      s += val[j] * x[col[j]];
    y[r] = s;
  }
}

bool want_simd() {
  const char* kill = std::getenv("CCLAB_NO_SIMD");
  if (kill && kill[0] != '\0' && kill[0] != '0') return false;
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const detail::Backend& active() {
  static const detail::Backend& b =
      want_simd() ? detail::avx2_backend() : detail::scalar_backend();
  return b;
}

}  // namespace

namespace detail {
const Backend& scalar_backend() {
  static const Backend b{dot_scalar, axpy_scalar,     xpby_scalar, scale_scalar,
                         sum_scalar, csr_spmv_scalar, "scalar"};
  return b;
}
}  // namespace detail

const char* backend_name() { return active().name; }
bool simd_active() { return active().name[0] == 'a'; }

double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
void xpby(const double* x, double beta, double* y, std::size_t n) {
  active().xpby(x, beta, y, n);
}
void scale(double alpha, double* x, std::size_t n) {
  active().scale(alpha, x, n);
}
double sum(const double* a, std::size_t n) { return active().sum(a, n); }
void csr_spmv(const std::int32_t* rowptr, const std::int32_t* col,
              const double* val, std::size_t nrows,
              const double* x, double* y) {
  active().csr_spmv(rowptr, col, val, nrows, x, y);
}

}  // namespace cclab::kern
