// AVX2 variants of the kernels.  This translation unit is the only one
// compiled with -mavx2 -mfma; it must not be built on non-x86 targets.
//
// Elementwise kernels (axpy, scale, quadratic_sink) must produce bitwise the
// same results as the scalar reference, so they avoid fused multiply-adds
// (one rounding vs. the reference's two) and the unit is compiled with
// -ffp-contract=off to keep the remainder loops un-fused too.  Reductions
// (dot, csr_matvec) re-associate across lanes and are only
// equal-up-to-roundoff; those do use FMA.

#if !defined(ROADFIELD_HAVE_AVX2)
#error "kernels_avx2.cpp requires ROADFIELD_HAVE_AVX2"
#endif

#include <immintrin.h>

#include <cmath>

#include "roadfield/kernels.hpp"

namespace roadfield::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline __m256d abs_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

}  // namespace

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double inf_norm_avx2(const double* x, std::size_t n) {
  __m256d vm = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    vm = _mm256_max_pd(vm, abs_pd(_mm256_loadu_pd(x + i)));
  __m128d lo = _mm256_castpd256_pd128(vm);
  __m128d hi = _mm256_extractf128_pd(vm, 1);
  lo = _mm_max_pd(lo, hi);
  double m = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void csr_matvec_avx2(std::size_t rows, const std::int32_t* row_ptr,
                     const std::int32_t* col, const double* val,
                     const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const std::int32_t b = row_ptr[r], e = row_ptr[r + 1];
    std::int32_t k = b;
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= e; k += 4) {
      __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
      __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < e; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

void quadratic_sink_avx2(const double* v, double dt, double* out,
                         std::size_t n) {
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vv = _mm256_loadu_pd(v + i);
    const __m256d vq = _mm256_mul_pd(_mm256_mul_pd(vdt, vv), vv);
    _mm256_storeu_pd(out + i, _mm256_sub_pd(vv, vq));
  }
  for (; i < n; ++i) out[i] = v[i] - dt * v[i] * v[i];
}

}  // namespace roadfield::kernels::detail
