#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "roadfield/operators.hpp"

// Principal (smallest-real-part, positive-eigenvector) eigenpairs of the
// assembled generators, plus the exhausting-domain limit lambda(X -> inf).
//
// Advected operators (c != 0) are heavily nonnormal: left and right
// eigenvectors overlap like e^{-c X / d}, so on wide domains the plain-form
// eigenvalue is numerically hypersensitive.  The solver therefore works in
// the exact similarity gauge E A E^{-1}, E = diag(e^{alpha x}), which is
// near-normal; eigenvalues are preserved exactly and only x-neighbor entries
// rescale (by e^{-+alpha h}), so the transform never over- or underflows.

namespace roadfield {

struct EigenResult {
  double lambda = 0.0;
  Eigen::VectorXd vector;  // stacked (road then field), inf-norm 1, positive
  double residual = 0.0;   // ||A w - lambda w||_inf / ||w||_inf, plain form
  int iterations = 0;      // linear solves performed (0 for the dense oracle)
  double alpha = 0.0;      // balancing gauge rate used (0 = none)
};

struct SolverOptions {
  double tol = 1e-10;       // working-form residual target
  int smoothing_steps = 20; // power steps on sI - A before inverse iteration
  int max_outer = 60;       // factorizations (shift updates)
  int max_inner = 200;      // solves per factorization
  int max_solves = 500;     // overall linear-solve budget
  bool balance = true;      // use the e^{alpha x} gauge when c != 0
};

// Gauge rate that symmetrizes the advection: c (d + D) / (4 d D) for the
// coupled system (the mean of the road and field rates), c / (2 d) for the
// field-only operators.
double balancing_rate(const SparseOperator& op);

// Safeguarded inverse iteration with shifts kept strictly below the current
// Rayleigh estimate.  Shifts below lambda_1 attract only the principal mode,
// so the iteration cannot be captured by interior or complex eigenvalues;
// positivity of the converged vector is then certified by clamping to the
// nonnegative cone and applying B = sI - A (entrywise nonnegative), whose
// support growth makes the iterate strictly positive without degrading the
// eigenpair.  Throws NumericsError when the iteration budget is exhausted or
// the converged mode is not the Perron mode.
EigenResult principal_eigenpair(const SparseOperator& op,
                                const SolverOptions& opts = {});

// Dense cross-check (dim <= 2000): full spectrum via Eigen::EigenSolver,
// returns the smallest-real-part eigenvalue.  Throws NumericsError if that
// eigenvalue is not real and simple.
EigenResult dense_oracle(const SparseOperator& op);

// Discrete energy form of the c = 0 coupled operator,
//   [ mu h D |phi'|^2 + nu h^2 (d |grad psi|^2 - m psi^2)
//     + h sum_i (mu phi_i - nu psi_{i,0})^2 ] / [ mu h |phi|^2 + nu h^2 |psi|^2 ],
// with one-sided differences against the Dirichlet ghost zeros.  With the
// weight W = diag(mu h on the road, nu h^2 on the field) the pairing W A is
// exactly symmetric, so the quotient is >= lambda_1 for every nonzero pair
// and equals lambda on eigenpairs.  Requires c == 0 and mu, nu > 0; throws
// ConfigError otherwise (the identity fails under advection).
double rayleigh_quotient(const Grid& grid, const Parameters& p,
                         const NicheProfile& profile,
                         const Eigen::VectorXd& phi, const Eigen::VectorXd& psi);

struct ExhaustionSchedule {
  double x0 = 8.0;       // first truncation half-width (Y = X throughout)
  double growth = 1.5;
  double stop_tol = 1e-4;
  int max_steps = 6;
  double spacing = 0.25;
  double max_x = 0.0;    // cap on X (0 = uncapped); rungs snap to the grid
  double eigen_tol = 1e-10;
};

struct ExhaustionRung {
  double x = 0.0;  // truncation half-width
  double y = 0.0;  // truncation height (== x under the default schedule)
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

struct ExhaustionResult {
  std::vector<ExhaustionRung> ladder;
  double lambda_inf = 0.0;  // value on the final rung
  bool converged = false;   // successive rungs agreed to stop_tol
};

// Runs the eigensolver on the exhausting family X_k = x0 * growth^k (snapped
// to multiples of the spacing, Y_k = X_k) until two successive values agree
// to stop_tol.  The assemble callback builds the operator for each rung.
ExhaustionResult exhaust_lambda(
    const std::function<SparseOperator(const Grid&)>& assemble,
    const ExhaustionSchedule& schedule = {});

// Same exhaustion for the named operator kind: Coupled uses all of p,
// Neumann uses (d, c), Robin uses (d, c, nu).
ExhaustionResult exhaust_lambda(const Parameters& p,
                                const NicheProfile& profile, OperatorKind kind,
                                const ExhaustionSchedule& schedule = {});

}  // namespace roadfield
