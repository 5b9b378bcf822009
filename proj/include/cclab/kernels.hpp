#pragma once
// Dense vector and sparse matrix micro-kernels with runtime SIMD dispatch.
// Scalar reference implementations are always compiled; an AVX2+FMA backend
// is selected at startup when the CPU supports it. Set CCLAB_NO_SIMD=1 to
// force the scalar path (used by the equivalence tests).

#include <cstddef>
#include <cstdint>

namespace cclab::kern {

/// Name of the active backend: "scalar" or "avx2".
const char* backend_name();

/// True when the AVX2 backend is active.
bool simd_active();

/// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

/// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// y[i] = x[i] + beta * y[i]  (CG direction update)
void xpby(const double* x, double beta, double* y, std::size_t n);

/// x[i] *= alpha
void scale(double alpha, double* x, std::size_t n);

/// sum_i a[i]
double sum(const double* a, std::size_t n);

/// y = A x for a CSR matrix with int32 indices.
void csr_spmv(const std::int32_t* rowptr, const std::int32_t* col,
              const double* val, std::size_t nrows,
              const double* x, double* y);

namespace detail {
struct Backend {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*xpby)(const double*, double, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  void (*csr_spmv)(const std::int32_t*, const std::int32_t*, const double*,
                   std::size_t, const double*, double*);
  const char* name;
};
const Backend& scalar_backend();
const Backend& avx2_backend();  // defined in kernels_avx2.cpp
}  // namespace detail

}  // namespace cclab::kern
