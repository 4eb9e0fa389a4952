#include <cmath>
#include <random>

#include "doctest.h"
#include "roadfield/eigensolver.hpp"
#include "roadfield/util.hpp"

using namespace roadfield;

namespace {

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

TEST_SUITE("eigensolver") {
  TEST_CASE("separable neumann eigenvalue approaches pi^2/2") {
    // m == 0 on [-1,1] x [0,1]: half cosine in y, full Dirichlet sine in x
    const Grid g = Grid::build(1.0, 1.0, 1.0 / 16);
    const SparseOperator op =
        assemble_neumann(g, 1.0, 0.0, NicheProfile::constant(0.0, true));
    const EigenResult r = principal_eigenpair(op);
    const double target = M_PI * M_PI / 2.0;
    CHECK(std::abs(r.lambda - target) / target < 0.01);
    CHECK(r.residual <= 1e-9);
    CHECK(r.vector.minCoeff() > 0.0);  // Perron mode
    CHECK(r.vector.maxCoeff() == doctest::Approx(1.0));
  }

  TEST_CASE("constant growth offsets shift the field eigenvalue exactly") {
    // A(m - s) = A(m) + s I on the field-only operator, so the principal
    // eigenvalue shifts by exactly s (the coupled road row carries no m)
    const Grid g = Grid::build(2.0, 2.0, 0.25);
    const double l1 =
        principal_eigenpair(assemble_neumann(g, 1.0, 0.0,
                                             NicheProfile::constant(-1.0)))
            .lambda;
    const double l2 =
        principal_eigenpair(assemble_neumann(g, 1.0, 0.0,
                                             NicheProfile::constant(-2.0)))
            .lambda;
    CHECK(l2 - l1 == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("balanced gauge reproduces the dense oracle under advection") {
    const Grid g = Grid::build(1.5, 1.0, 0.25);
    const SparseOperator op = assemble_coupled(g, params(2.0, 0.5, 1.0, 0.8, 1.5),
                                               NicheProfile::radial_fl(1.0));
    const EigenResult it = principal_eigenpair(op);
    const EigenResult ref = dense_oracle(op);
    CHECK(it.alpha != 0.0);  // the similarity gauge engaged
    CHECK(std::abs(it.lambda - ref.lambda) <= 1e-9);
    CHECK((it.vector - ref.vector).cwiseAbs().maxCoeff() <= 1e-8);
  }

  TEST_CASE("solver budget violations surface as errors") {
    const Grid g = Grid::build(1.0, 1.0, 0.5);
    const SparseOperator op = assemble_coupled(g, params(1, 1, 1, 1, 0),
                                               NicheProfile::radial_fl(1.0));
    SolverOptions opts;
    opts.max_solves = 1;
    CHECK_THROWS_AS(principal_eigenpair(op, opts), NumericsError);
  }

  TEST_CASE("rayleigh quotient equals lambda on the eigenpair") {
    const Grid g = Grid::build(2.0, 2.0, 0.25);
    const Parameters p = params(1.0, 1.5, 2.0, 0.7, 0.0);
    const NicheProfile m = NicheProfile::radial_fl(1.5);
    const EigenResult r = principal_eigenpair(assemble_coupled(g, p, m));
    const double q = rayleigh_quotient(g, p, m, r.vector.head(g.nx),
                                       r.vector.tail(g.nx * g.ny));
    CHECK(q == doctest::Approx(r.lambda).epsilon(1e-8));
  }

  TEST_CASE("rayleigh quotient floors at the principal eigenvalue") {
    const Grid g = Grid::build(2.0, 2.0, 0.5);
    const Parameters p = params(1, 1, 1, 1, 0);
    const NicheProfile m = NicheProfile::radial_fl(1.5);
    const double lambda =
        principal_eigenpair(assemble_coupled(g, p, m)).lambda;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd phi(g.nx), psi(g.nx * g.ny);
      for (int i = 0; i < phi.size(); ++i) phi[i] = uni(rng);
      for (int i = 0; i < psi.size(); ++i) psi[i] = uni(rng);
      CHECK(rayleigh_quotient(g, p, m, phi, psi) >= lambda - 1e-8);
    }
  }

  TEST_CASE("rayleigh quotient preconditions") {
    const Grid g = Grid::build(1.0, 1.0, 0.5);
    const NicheProfile m = NicheProfile::radial_fl(1.0);
    const Eigen::VectorXd phi = Eigen::VectorXd::Ones(g.nx);
    const Eigen::VectorXd psi = Eigen::VectorXd::Ones(g.nx * g.ny);
    CHECK_THROWS_AS(
        rayleigh_quotient(g, params(1, 1, 1, 1, 0.5), m, phi, psi),
        ConfigError);  // advection breaks the identity
    CHECK_THROWS_AS(
        rayleigh_quotient(g, params(1, 1, 1, 1, 0), m, phi,
                          Eigen::VectorXd::Ones(3)),
        ConfigError);  // shape mismatch
    CHECK_THROWS_AS(
        rayleigh_quotient(g, params(1, 1, 1, 1, 0), m,
                          Eigen::VectorXd::Zero(g.nx),
                          Eigen::VectorXd::Zero(g.nx * g.ny)),
        ConfigError);  // zero norm
  }

  TEST_CASE("exhaustion ladder is nonincreasing and converges") {
    ExhaustionSchedule sched;
    sched.x0 = 4.0;
    sched.growth = 1.5;
    sched.max_steps = 4;
    sched.spacing = 0.5;
    sched.stop_tol = 1e-3;
    const ExhaustionResult ex =
        exhaust_lambda(params(1, 1, 1, 1, 0), NicheProfile::radial_fl(3.0),
                       OperatorKind::Coupled, sched);
    CHECK(ex.converged);
    CHECK(ex.ladder.size() >= 2);
    for (std::size_t k = 1; k < ex.ladder.size(); ++k) {
      CHECK(ex.ladder[k].lambda <= ex.ladder[k - 1].lambda + 1e-12);
      CHECK(ex.ladder[k].x > ex.ladder[k - 1].x);
    }
    CHECK(ex.lambda_inf == ex.ladder.back().lambda);
  }

  TEST_CASE("hostile niches pin the eigenvalue near the damping floor") {
    // m <= -tanh(10): lambda >= tanh(10) on every truncation
    ExhaustionSchedule sched;
    sched.x0 = 4.0;
    sched.max_steps = 2;
    sched.spacing = 0.5;
    const ExhaustionResult ex =
        exhaust_lambda(params(1, 1, 1, 1, 0), NicheProfile::radial_fl(-10.0),
                       OperatorKind::Neumann, sched);
    CHECK(ex.lambda_inf >= std::tanh(10.0) - 1e-9);
  }

  TEST_CASE("the exhausted value is schedule-insensitive") {
    const Parameters p = params(1, 1, 1, 1, 0);
    const NicheProfile m = NicheProfile::radial_fl(3.0);
    ExhaustionSchedule a;
    a.x0 = 6.0;
    a.growth = 1.5;
    a.max_steps = 5;
    a.spacing = 0.5;
    a.stop_tol = 1e-3;
    ExhaustionSchedule b = a;
    b.growth = 2.0;
    const double la =
        exhaust_lambda(p, m, OperatorKind::Coupled, a).lambda_inf;
    const double lb =
        exhaust_lambda(p, m, OperatorKind::Coupled, b).lambda_inf;
    CHECK(std::abs(la - lb) <= 2 * a.stop_tol);
  }

  TEST_CASE("schedule validation") {
    ExhaustionSchedule bad;
    bad.growth = 0.9;  // must expand
    CHECK_THROWS_AS(exhaust_lambda(params(1, 1, 1, 1, 0),
                                   NicheProfile::radial_fl(1.0),
                                   OperatorKind::Coupled, bad),
                    ConfigError);
  }
}
