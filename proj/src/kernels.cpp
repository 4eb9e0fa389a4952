#include "roadfield/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace roadfield::kernels {

namespace detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double inf_norm_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void csr_matvec_scalar(std::size_t rows, const std::int32_t* row_ptr,
                       const std::int32_t* col, const double* val,
                       const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      acc += val[k] * x[col[k]];
    y[r] = acc;
  }
}

void quadratic_sink_scalar(const double* v, double dt, double* out,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = v[i] - dt * v[i] * v[i];
}

}  // namespace detail

namespace {

Backend g_backend = [] {
#if defined(ROADFIELD_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
  return Backend::Scalar;
}();

}  // namespace

bool avx2_available() {
#if defined(ROADFIELD_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available())
    throw std::invalid_argument("kernels: AVX2 backend not available");
  g_backend = b;
}

double dot(const double* x, const double* y, std::size_t n) {
#if defined(ROADFIELD_HAVE_AVX2)
  if (g_backend == Backend::Avx2) return detail::dot_avx2(x, y, n);
#endif
  return detail::dot_scalar(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
#if defined(ROADFIELD_HAVE_AVX2)
  if (g_backend == Backend::Avx2) return detail::axpy_avx2(a, x, y, n);
#endif
  detail::axpy_scalar(a, x, y, n);
}

void scale(double a, double* x, std::size_t n) {
#if defined(ROADFIELD_HAVE_AVX2)
  if (g_backend == Backend::Avx2) return detail::scale_avx2(a, x, n);
#endif
  detail::scale_scalar(a, x, n);
}

double inf_norm(const double* x, std::size_t n) {
#if defined(ROADFIELD_HAVE_AVX2)
  if (g_backend == Backend::Avx2) return detail::inf_norm_avx2(x, n);
#endif
  return detail::inf_norm_scalar(x, n);
}

void csr_matvec(std::size_t rows, const std::int32_t* row_ptr,
                const std::int32_t* col, const double* val, const double* x,
                double* y) {
#if defined(ROADFIELD_HAVE_AVX2)
  if (g_backend == Backend::Avx2)
    return detail::csr_matvec_avx2(rows, row_ptr, col, val, x, y);
#endif
  detail::csr_matvec_scalar(rows, row_ptr, col, val, x, y);
}

void quadratic_sink(const double* v, double dt, double* out, std::size_t n) {
#if defined(ROADFIELD_HAVE_AVX2)
  if (g_backend == Backend::Avx2)
    return detail::quadratic_sink_avx2(v, dt, out, n);
#endif
  detail::quadratic_sink_scalar(v, dt, out, n);
}

}  // namespace roadfield::kernels
