#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "roadfield/grid.hpp"
#include "roadfield/model.hpp"

// Finite-volume assembly of the linearized generators, written as operators
// A with  A w = lambda w  for the principal eigenproblem (A carries the
// negated elliptic parts, so "more favorable" means "smaller lambda").
//
//   road row:   -D phi'' - c phi' + mu phi - nu psi|_{y=0}
//   field row:  -d (Lap psi) - c psi_x - m psi        (+ exchange at j = 0)
//
// Outer boundaries (x = +-X, y = Y, road endpoints) are homogeneous
// Dirichlet via half-cell fluxes.  The y = 0 face of the j = 0 field cells
// carries the kind-specific condition:
//   Coupled:  flux (nu psi - mu phi)/h   (exchange balance)
//   Neumann:  zero flux
//   Robin:    flux  nu psi / h           (-d dy psi + nu psi = 0; nu = 0
//                                          degenerates to Neumann exactly)
// Advection uses central face averages when |c| h / (2 min diffusivity) <= 1
// and first-order upwinding otherwise (logged); both keep off-diagonal
// entries nonpositive, so sI - A stays nonnegative and irreducible for
// mu, nu > 0 (Perron structure).

namespace roadfield {

enum class OperatorKind { Coupled, Neumann, Robin };

const char* to_string(OperatorKind k);

struct CsrMatrix {
  std::int32_t n = 0;
  std::vector<std::int32_t> row_ptr;  // size n + 1
  std::vector<std::int32_t> col;
  std::vector<double> val;

  void matvec(const double* x, double* y) const;
  std::size_t nnz() const { return val.size(); }
};

struct SparseOperator {
  OperatorKind kind = OperatorKind::Coupled;
  Grid grid;
  Parameters params;  // fields used depend on kind (see assemblers)
  NicheProfile profile = NicheProfile::constant(-1.0);
  bool upwind = false;
  CsrMatrix matrix;

  StackedIndex index() const {
    return {kind == OperatorKind::Coupled ? grid.nx : 0, grid.nx, grid.ny};
  }
  int dim() const { return matrix.n; }

  // One "row col value" line per stored entry, 17 significant digits,
  // ascending row then column.
  void dump_coordinates(std::ostream& out) const;
};

// Coupled road-field generator; uses all of p (D, d, mu, nu, c).
SparseOperator assemble_coupled(const Grid& grid, const Parameters& p,
                                const NicheProfile& profile);

// Field-only generator with zero-flux road boundary (the "no road" system).
SparseOperator assemble_neumann(const Grid& grid, double d, double c,
                                const NicheProfile& profile);

// Field-only generator with dissipative boundary -d dy psi + nu psi = 0.
SparseOperator assemble_robin(const Grid& grid, double d, double c, double nu,
                              const NicheProfile& profile);

}  // namespace roadfield
