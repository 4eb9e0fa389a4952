#include "roadfield/operators.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <ostream>
#include <utility>

#include "roadfield/kernels.hpp"
#include "roadfield/util.hpp"

namespace roadfield {

const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::Coupled:
      return "coupled";
    case OperatorKind::Neumann:
      return "neumann";
    case OperatorKind::Robin:
      return "robin";
  }
  return "unknown";
}

void CsrMatrix::matvec(const double* x, double* y) const {
  kernels::csr_matvec(static_cast<std::size_t>(n), row_ptr.data(), col.data(),
                      val.data(), x, y);
}

namespace {

// Accumulates one row at a time; duplicate columns (diffusion and advection
// hitting the same neighbor) are summed, columns stored ascending.
class CsrBuilder {
 public:
  explicit CsrBuilder(int n) {
    csr_.n = n;
    csr_.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    csr_.col.reserve(static_cast<std::size_t>(n) * 6);
    csr_.val.reserve(static_cast<std::size_t>(n) * 6);
  }

  void add(int col, double v) { row_.emplace_back(col, v); }

  void finish_row(int r) {
    std::stable_sort(
        row_.begin(), row_.end(),
        [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row_.size();) {
      const int c = row_[k].first;
      double v = 0.0;
      for (; k < row_.size() && row_[k].first == c; ++k) v += row_[k].second;
      csr_.col.push_back(c);
      csr_.val.push_back(v);
    }
    csr_.row_ptr[static_cast<std::size_t>(r) + 1] =
        static_cast<std::int32_t>(csr_.col.size());
    row_.clear();
  }

  CsrMatrix take() { return std::move(csr_); }

 private:
  CsrMatrix csr_;
  std::vector<std::pair<int, double>> row_;
};

SparseOperator assemble_impl(OperatorKind kind, const Grid& grid,
                             const Parameters& p,
                             const NicheProfile& profile) {
  p.validate();
  const int nx = grid.nx;
  const int ny = grid.ny;
  const StackedIndex idx{kind == OperatorKind::Coupled ? nx : 0, nx, ny};
  const double h = grid.spacing;
  const double ih = 1.0 / h;
  const double ih2 = ih * ih;
  const double D = p.D;
  const double d = p.d;
  const double mu = p.mu;
  const double nu = p.nu;
  const double c = p.c;
  const double dmin = kind == OperatorKind::Coupled ? std::min(d, D) : d;
  const double peclet = std::abs(c) * h / (2.0 * dmin);
  const bool upwind = peclet > 1.0;
  if (upwind) {
    std::cerr << "[operators] cell Peclet number " << fmt17(peclet)
              << " > 1: using first-order upwinding (refine h to restore "
                 "central differencing)\n";
  }

  CsrBuilder bld(idx.size());

  // -c d/dx in flux form.  The Dirichlet faces at i = 0 / i = nx-1 carry the
  // exact boundary value 0, so they contribute nothing in the central branch.
  const auto advect = [&](int r, int left, int right, int i) {
    if (c == 0.0) return;
    if (!upwind) {
      if (i > 0) bld.add(left, c / (2.0 * h));
      if (i < nx - 1) bld.add(right, -c / (2.0 * h));
    } else if (c > 0.0) {
      bld.add(r, c * ih);
      if (i < nx - 1) bld.add(right, -c * ih);
    } else {
      bld.add(r, -c * ih);
      if (i > 0) bld.add(left, c * ih);
    }
  };

  if (kind == OperatorKind::Coupled) {
    for (int i = 0; i < nx; ++i) {
      const int r = idx.road(i);
      // interior: standard 3-point stencil; endpoints: half-cell Dirichlet
      // flux 2D/h^2 on top of the single interior face.
      const double ddiag =
          (0 < i && i < nx - 1) ? 2.0 * D * ih2 : 3.0 * D * ih2;
      bld.add(r, ddiag + mu);
      if (i > 0) bld.add(r - 1, -D * ih2);
      if (i < nx - 1) bld.add(r + 1, -D * ih2);
      advect(r, r - 1, r + 1, i);
      bld.add(idx.field(i, 0), -nu);
      bld.finish_row(r);
    }
  }

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int r = idx.field(i, j);
      double diag = 0.0;
      if (i > 0) {
        bld.add(idx.field(i - 1, j), -d * ih2);
        diag += d * ih2;
      } else {
        diag += 2.0 * d * ih2;  // half-cell Dirichlet flux at x = -X
      }
      if (i < nx - 1) {
        bld.add(idx.field(i + 1, j), -d * ih2);
        diag += d * ih2;
      } else {
        diag += 2.0 * d * ih2;  // x = +X
      }
      if (j < ny - 1) {
        bld.add(idx.field(i, j + 1), -d * ih2);
        diag += d * ih2;
      } else {
        diag += 2.0 * d * ih2;  // y = Y
      }
      if (j > 0) {
        bld.add(idx.field(i, j - 1), -d * ih2);
        diag += d * ih2;
      } else if (kind == OperatorKind::Coupled) {
        // exchange flux (nu psi - mu phi)/h through the road face
        diag += nu * ih;
        bld.add(idx.road(i), -mu * ih);
      } else if (kind == OperatorKind::Robin) {
        diag += nu * ih;  // -d dy psi + nu psi = 0
      }
      // Neumann: zero flux through y = 0, nothing to add.
      advect(r, idx.field(i - 1, j), idx.field(i + 1, j), i);
      bld.add(r, diag - profile(grid.x(i), grid.y(j)));
      bld.finish_row(r);
    }
  }

  SparseOperator op;
  op.kind = kind;
  op.grid = grid;
  op.params = p;
  op.profile = profile;
  op.upwind = upwind;
  op.matrix = bld.take();
  return op;
}

}  // namespace

SparseOperator assemble_coupled(const Grid& grid, const Parameters& p,
                                const NicheProfile& profile) {
  return assemble_impl(OperatorKind::Coupled, grid, p, profile);
}

SparseOperator assemble_neumann(const Grid& grid, double d, double c,
                                const NicheProfile& profile) {
  Parameters p;
  p.D = d;  // unused by the field-only scheme; keeps min(d, D) == d
  p.d = d;
  p.mu = 0.0;
  p.nu = 0.0;
  p.c = c;
  p.strict_exchange = false;
  return assemble_impl(OperatorKind::Neumann, grid, p, profile);
}

SparseOperator assemble_robin(const Grid& grid, double d, double c, double nu,
                              const NicheProfile& profile) {
  Parameters p;
  p.D = d;
  p.d = d;
  p.mu = 0.0;
  p.nu = nu;
  p.c = c;
  p.strict_exchange = false;
  return assemble_impl(OperatorKind::Robin, grid, p, profile);
}

void SparseOperator::dump_coordinates(std::ostream& out) const {
  for (std::int32_t r = 0; r < matrix.n; ++r) {
    for (std::int32_t k = matrix.row_ptr[r]; k < matrix.row_ptr[r + 1]; ++k) {
      out << r << ' ' << matrix.col[k] << ' ' << fmt17(matrix.val[k]) << '\n';
    }
  }
}

}  // namespace roadfield
