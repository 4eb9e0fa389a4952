#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops used by the iterative eigensolver and the time
// stepper.  Every kernel has a scalar reference implementation and, on x86
// hosts with AVX2, a SIMD variant selected at runtime.  The two backends are
// equivalence-tested against each other; the backend can be forced (mainly
// for those tests) via set_backend().

namespace roadfield::kernels {

enum class Backend { Scalar, Avx2 };

// Backend currently in use for all kernels.
Backend active_backend();

// Force a backend.  Throws std::invalid_argument if the requested backend is
// not available on this machine.
void set_backend(Backend b);

// True when AVX2 code was compiled in and the CPU supports it.
bool avx2_available();

double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);  // y += a*x
void scale(double a, double* x, std::size_t n);
double inf_norm(const double* x, std::size_t n);

// y = A x for a CSR matrix with int32 indices.
void csr_matvec(std::size_t rows, const std::int32_t* row_ptr,
                const std::int32_t* col, const double* val, const double* x,
                double* y);

// out_i = v_i - dt * v_i^2  (explicit part of the IMEX step).
void quadratic_sink(const double* v, double dt, double* out, std::size_t n);

namespace detail {  // scalar reference implementations (always available)
double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void scale_scalar(double a, double* x, std::size_t n);
double inf_norm_scalar(const double* x, std::size_t n);
void csr_matvec_scalar(std::size_t rows, const std::int32_t* row_ptr,
                       const std::int32_t* col, const double* val,
                       const double* x, double* y);
void quadratic_sink_scalar(const double* v, double dt, double* out,
                           std::size_t n);
#if defined(ROADFIELD_HAVE_AVX2)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void scale_avx2(double a, double* x, std::size_t n);
double inf_norm_avx2(const double* x, std::size_t n);
void csr_matvec_avx2(std::size_t rows, const std::int32_t* row_ptr,
                     const std::int32_t* col, const double* val,
                     const double* x, double* y);
void quadratic_sink_avx2(const double* v, double dt, double* out,
                         std::size_t n);
#endif
}  // namespace detail

}  // namespace roadfield::kernels
