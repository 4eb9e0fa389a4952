#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "roadfield/kernels.hpp"

// The SIMD variants must agree with the scalar references: elementwise
// kernels bit-for-bit, reductions and matvecs up to reassociation roundoff.

namespace k = roadfield::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = uni(rng);
  return v;
}

// Random square CSR with ~4 entries per row, int32 indexing.
struct SmallCsr {
  std::int32_t n;
  std::vector<std::int32_t> row_ptr, col;
  std::vector<double> val;
};

SmallCsr random_csr(std::mt19937_64& rng, std::int32_t n) {
  std::uniform_int_distribution<std::int32_t> pick(0, n - 1);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  SmallCsr m;
  m.n = n;
  m.row_ptr.push_back(0);
  for (std::int32_t r = 0; r < n; ++r) {
    for (int e = 0; e < 4; ++e) {
      m.col.push_back(pick(rng));
      m.val.push_back(uni(rng));
    }
    m.row_ptr.push_back(static_cast<std::int32_t>(m.col.size()));
  }
  return m;
}

// Sizes that straddle SIMD lane boundaries.
const std::size_t kSizes[] = {0, 1, 3, 4, 5, 8, 15, 16, 17, 71};

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("elementwise kernels match the scalar reference exactly") {
    std::mt19937_64 rng(7);
    for (const std::size_t n : kSizes) {
      const std::vector<double> x = random_vec(rng, n);
      std::vector<double> y = random_vec(rng, n);

      std::vector<double> y_ref = y;
      k::detail::axpy_scalar(0.7, x.data(), y_ref.data(), n);
      std::vector<double> y_fast = y;
      k::axpy(0.7, x.data(), y_fast.data(), n);
      CHECK(y_fast == y_ref);

      std::vector<double> s_ref = x;
      k::detail::scale_scalar(-1.3, s_ref.data(), n);
      std::vector<double> s_fast = x;
      k::scale(-1.3, s_fast.data(), n);
      CHECK(s_fast == s_ref);

      std::vector<double> q_ref(n), q_fast(n);
      k::detail::quadratic_sink_scalar(x.data(), 0.05, q_ref.data(), n);
      k::quadratic_sink(x.data(), 0.05, q_fast.data(), n);
      CHECK(q_fast == q_ref);
    }
  }

  TEST_CASE("reductions match up to reassociation roundoff") {
    std::mt19937_64 rng(11);
    for (const std::size_t n : kSizes) {
      const std::vector<double> x = random_vec(rng, n);
      const std::vector<double> y = random_vec(rng, n);
      const double d_ref = k::detail::dot_scalar(x.data(), y.data(), n);
      const double d = k::dot(x.data(), y.data(), n);
      CHECK(d == doctest::Approx(d_ref).epsilon(1e-13));
      // the max of |x_i| is order-independent
      CHECK(k::inf_norm(x.data(), n) ==
            k::detail::inf_norm_scalar(x.data(), n));
    }
  }

  TEST_CASE("csr matvec matches the scalar reference") {
    std::mt19937_64 rng(13);
    for (const std::int32_t n : {1, 7, 33, 130}) {
      const SmallCsr m = random_csr(rng, n);
      const std::vector<double> x =
          random_vec(rng, static_cast<std::size_t>(n));
      std::vector<double> y_ref(static_cast<std::size_t>(n));
      std::vector<double> y(static_cast<std::size_t>(n));
      k::detail::csr_matvec_scalar(static_cast<std::size_t>(n),
                                   m.row_ptr.data(), m.col.data(),
                                   m.val.data(), x.data(), y_ref.data());
      k::csr_matvec(static_cast<std::size_t>(n), m.row_ptr.data(),
                    m.col.data(), m.val.data(), x.data(), y.data());
      for (std::int32_t i = 0; i < n; ++i)
        CHECK(y[static_cast<std::size_t>(i)] ==
              doctest::Approx(y_ref[static_cast<std::size_t>(i)])
                  .epsilon(1e-13));
    }
  }

  TEST_CASE("backend forcing") {
    const k::Backend original = k::active_backend();
    k::set_backend(k::Backend::Scalar);
    CHECK(k::active_backend() == k::Backend::Scalar);
    if (k::avx2_available()) {
      k::set_backend(k::Backend::Avx2);
      CHECK(k::active_backend() == k::Backend::Avx2);
    } else {
      CHECK_THROWS_AS(k::set_backend(k::Backend::Avx2),
                      std::invalid_argument);
    }
    k::set_backend(original);
  }

  TEST_CASE("both backends agree when avx2 is present") {
    if (!k::avx2_available()) return;
    const k::Backend original = k::active_backend();
    std::mt19937_64 rng(17);
    const std::size_t n = 67;
    const std::vector<double> x = random_vec(rng, n);
    const std::vector<double> y = random_vec(rng, n);
    k::set_backend(k::Backend::Avx2);
    const double dot_simd = k::dot(x.data(), y.data(), n);
    const double inf_simd = k::inf_norm(x.data(), n);
    k::set_backend(k::Backend::Scalar);
    CHECK(dot_simd ==
          doctest::Approx(k::dot(x.data(), y.data(), n)).epsilon(1e-13));
    CHECK(inf_simd == k::inf_norm(x.data(), n));
    k::set_backend(original);
  }
}
