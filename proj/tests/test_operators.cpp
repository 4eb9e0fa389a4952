#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "roadfield/eigensolver.hpp"
#include "roadfield/operators.hpp"
#include "roadfield/util.hpp"

using namespace roadfield;

namespace {

Eigen::MatrixXd dense_of(const SparseOperator& op) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(op.dim(), op.dim());
  const CsrMatrix& m = op.matrix;
  for (std::int32_t r = 0; r < m.n; ++r)
    for (std::int32_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      a(r, m.col[k]) += m.val[k];
  return a;
}

Parameters params(double D, double d, double mu, double nu, double c) {
  Parameters p;
  p.D = D;
  p.d = d;
  p.mu = mu;
  p.nu = nu;
  p.c = c;
  return p;
}

}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("decoupled road block has the exact discrete dirichlet spectrum") {
    // With mu = nu = 0 the road row is the 1D Dirichlet Laplacian on cell
    // centers, whose lowest eigenvalue is exactly D (4/h^2) sin^2(pi h / 4X)
    // (half-cosine mode against the mirrored ghost cells).  A strongly
    // damped field keeps the road mode principal.
    const Grid g = Grid::build(2.0, 1.0, 0.25);
    Parameters p = params(1.5, 1.0, 0.0, 0.0, 0.0);
    p.strict_exchange = false;
    const SparseOperator op =
        assemble_coupled(g, p, NicheProfile::constant(-10.0));
    const double h = g.spacing;
    const double exact = 1.5 * (4.0 / (h * h)) *
                         std::pow(std::sin(M_PI * h / (4.0 * g.half_width)), 2);
    const EigenResult r = dense_oracle(op);
    CHECK(r.lambda == doctest::Approx(exact).epsilon(1e-12));
  }

  TEST_CASE("weighted symmetry of the resting coupled operator") {
    // W A = (W A)^T with W = diag(mu h, nu h^2): the discrete counterpart of
    // the energy identity behind the Rayleigh quotient.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.3, 2.5);
    for (int trial = 0; trial < 4; ++trial) {
      const Grid g = Grid::build(1.5, 1.0, 0.25);
      const Parameters p =
          params(uni(rng), uni(rng), uni(rng), uni(rng), 0.0);
      const SparseOperator op =
          assemble_coupled(g, p, NicheProfile::radial_fl(1.0));
      Eigen::VectorXd w(op.dim());
      for (int i = 0; i < g.nx; ++i) w[i] = p.mu * g.spacing;
      for (int i = g.nx; i < op.dim(); ++i)
        w[i] = p.nu * g.spacing * g.spacing;
      const Eigen::MatrixXd wa = w.asDiagonal() * dense_of(op);
      const double scale = wa.cwiseAbs().maxCoeff();
      CHECK((wa - wa.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    }
  }

  TEST_CASE("advection breaks symmetry but not the sign structure") {
    const Grid g = Grid::build(2.0, 1.0, 0.25);
    const NicheProfile m = NicheProfile::radial_fl(1.0);
    // diffusion-dominated: central differences, still a Z-matrix
    const SparseOperator central = assemble_coupled(g, params(1, 1, 1, 1, 0.5), m);
    CHECK_FALSE(central.upwind);
    // advection-dominated: one-sided differences take over
    const SparseOperator upwind = assemble_coupled(g, params(1, 1, 1, 1, 50.0), m);
    CHECK(upwind.upwind);
    for (const SparseOperator* op : {&central, &upwind}) {
      const CsrMatrix& csr = op->matrix;
      for (std::int32_t r = 0; r < csr.n; ++r)
        for (std::int32_t k = csr.row_ptr[r]; k < csr.row_ptr[r + 1]; ++k)
          if (csr.col[k] != r) CHECK(csr.val[k] <= 0.0);  // off-diagonal
    }
  }

  TEST_CASE("robin with zero uptake is exactly the neumann operator") {
    const Grid g = Grid::build(1.5, 1.0, 0.25);
    const NicheProfile m = NicheProfile::radial_fl(1.0);
    const SparseOperator robin = assemble_robin(g, 1.2, 0.7, 0.0, m);
    const SparseOperator neumann = assemble_neumann(g, 1.2, 0.7, m);
    CHECK(robin.matrix.row_ptr == neumann.matrix.row_ptr);
    CHECK(robin.matrix.col == neumann.matrix.col);
    CHECK(robin.matrix.val == neumann.matrix.val);
    // positive uptake strictly strengthens the boundary row diagonal
    const SparseOperator damped = assemble_robin(g, 1.2, 0.7, 0.8, m);
    CHECK(dense_oracle(damped).lambda > dense_oracle(neumann).lambda);
  }

  TEST_CASE("assembly is deterministic") {
    const Grid g = Grid::build(1.5, 1.0, 0.25);
    const Parameters p = params(2.0, 0.7, 1.3, 0.4, 1.0);
    const NicheProfile m = NicheProfile::radial_fl(1.0);
    const SparseOperator a = assemble_coupled(g, p, m);
    const SparseOperator b = assemble_coupled(g, p, m);
    CHECK(a.matrix.row_ptr == b.matrix.row_ptr);
    CHECK(a.matrix.col == b.matrix.col);
    CHECK(a.matrix.val == b.matrix.val);  // bitwise
  }

  TEST_CASE("iterative eigenpair matches the dense oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(0.4, 2.0);
    for (const double c : {0.0, 1.0}) {
      const Grid g = Grid::build(1.0, 1.0, 0.5);
      const Parameters p = params(uni(rng), uni(rng), uni(rng), uni(rng), c);
      const SparseOperator op =
          assemble_coupled(g, p, NicheProfile::radial_fl(0.8));
      const EigenResult it = principal_eigenpair(op);
      const EigenResult ref = dense_oracle(op);
      CHECK(std::abs(it.lambda - ref.lambda) <= 1e-10);
      CHECK((it.vector - ref.vector).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }

  TEST_CASE("coordinate dump is parseable and complete") {
    const Grid g = Grid::build(1.0, 1.0, 0.5);
    const SparseOperator op =
        assemble_coupled(g, params(1, 1, 1, 1, 0), NicheProfile::radial_fl(1.0));
    std::ostringstream out;
    op.dump_coordinates(out);
    std::istringstream in(out.str());
    std::size_t lines = 0;
    int row, col;
    double val;
    int prev_row = -1, prev_col = -1;
    while (in >> row >> col >> val) {
      ++lines;
      CHECK(row >= 0);
      CHECK(col >= 0);
      CHECK(row < op.dim());
      CHECK(col < op.dim());
      // ascending (row, col) order
      CHECK((row > prev_row || (row == prev_row && col > prev_col)));
      prev_row = row;
      prev_col = col;
    }
    CHECK(lines == op.matrix.nnz());
  }

  TEST_CASE("nonpositive exchange rates are rejected in the strict regime") {
    const Grid g = Grid::build(1.0, 1.0, 0.5);
    Parameters p = params(1, 1, 0.0, 1, 0);
    CHECK_THROWS_AS(assemble_coupled(g, p, NicheProfile::radial_fl(1.0)),
                    ConfigError);
    p.strict_exchange = false;
    CHECK_NOTHROW(assemble_coupled(g, p, NicheProfile::radial_fl(1.0)));
  }
}
