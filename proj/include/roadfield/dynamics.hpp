#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "roadfield/model.hpp"
#include "roadfield/operators.hpp"

// Semilinear dynamics  dw/dt = -A w + N(w),  N = (0, -v^2) on the field,
// integrated with an IMEX Euler step:  (I + dt A) w^{n+1} = w^n + dt N(w^n).
// For admissible dt the implicit matrix is an M-matrix and the explicit map
// v -> v - dt v^2 is monotone on the reachable range, so the discrete flow
// preserves nonnegativity and ordering -- the comparison principle holds
// step by step.  Persistence / extinction is decided by squeezing between a
// decreasing supersolution and (when lambda_1 < 0) an increasing eigenvector
// subsolution.

namespace roadfield {

// One snapshot of the coupled pair in the moving frame: u on the road cells,
// v on the field cells (row-major, index j * nx + i).  Trajectories started
// from nonnegative data keep every entry >= 0 and <= max(initial sup,
// S max(1, nu/mu)), the constant supersolution level.
struct State {
  double t = 0.0;
  Eigen::VectorXd u;  // road densities, size grid.nx
  Eigen::VectorXd v;  // field densities, size grid.nx * grid.ny
  Grid grid;

  static State zero(const Grid& g);
  static State constant(const Grid& g, double road_level, double field_level);
  double sup() const;  // max entry over both components (0 when empty)
  double min() const;  // min entry over both components (0 when empty)
};

class Stepper {
 public:
  // Factors I + dt A once for reuse across steps.
  Stepper(const SparseOperator& op, double dt);
  ~Stepper();
  Stepper(const Stepper&) = delete;
  Stepper& operator=(const Stepper&) = delete;

  void step(Eigen::VectorXd& w) const;  // one IMEX Euler step in place
  double dt() const { return dt_; }
  const SparseOperator& op() const { return op_; }
  double saturation() const { return saturation_; }

  // Largest dt keeping the explicit reaction map monotone up to field level
  // `field_sup`:  dt ([sup m]+ + 2 field_sup) <= 1/2.
  double admissible_dt(double field_sup) const;
  // Throws ConfigError naming the admissible bound when dt() exceeds it.
  void require_admissible(double field_sup) const;

 private:
  struct Factorization;
  SparseOperator op_;
  double dt_ = 0.0;
  double saturation_ = 0.0;
  double sup_m_ = 0.0;
  std::unique_ptr<Factorization> fact_;
  mutable Eigen::VectorXd rhs_;
};

// Advances one IMEX step of the coupled system.  The implicit factorization
// is cached per (grid, parameters, profile, dt) and reused across calls.
// Throws ConfigError when dt violates the stability precondition
// dt (sup m + 2 sup v) <= 1/2, naming the admissible bound.
State step(const State& state, const Parameters& p, const ReactionTerm& term,
           double dt);

enum class Verdict { Persistence, Extinction, Undetermined };

const char* to_string(Verdict v);

// Snapshot hook: called at every verdict check with the upper-bracket state
// (and the lower bracket while one is being evolved; null otherwise).
using FrameSink = std::function<void(const State& upper, const State* lower)>;

// Knobs beyond the core classification contract.
struct EvolveOptions {
  double lambda_margin = 0.02;  // |lambda_1| below this is too close to call
  int check_every = 10;         // steps between verdict checks
  double eigen_tol = 1e-10;
  FrameSink sink;
};

struct Classification {
  Verdict verdict = Verdict::Undetermined;
  double lambda = 0.0;       // principal eigenvalue on this grid
  double time = 0.0;         // simulated time at the verdict
  int steps = 0;
  double bracket_gap = 0.0;  // final relative gap (persistence track)
  double sup_state = 0.0;    // final sup of the upper state
  double core_min = 0.0;     // final min over {m > 0} of the tracked state
  double state_min = 0.0;    // smallest entry seen in any checked state
  std::optional<State> steady_state;  // present iff Persistence
  // One row per check: (t, sup of upper state, min over the favorable core,
  // relative bracket gap).  Without a lower bracket the gap column holds
  // sup/S, the extinction progress.
  std::vector<std::array<double, 4>> evidence;
};

// Decides the dichotomy for the coupled system on the given grid:
//   lambda_1 <= -margin:  squeeze between the supersolution (nu S / mu, S)
//       and the subsolution eps * (principal eigenvector); relative gap
//       <= steady_tol with a positive core minimum => Persistence, with the
//       converged upper state reported as the steady state.
//   lambda_1 >= +margin:  evolve the supersolution; sup < steady_tol * S
//       => Extinction.
//   otherwise, or if the horizon runs out: Undetermined.
Classification evolve_classify(const Parameters& p, const ReactionTerm& term,
                               const Grid& grid, double horizon = 500.0,
                               double dt = 0.05, double steady_tol = 1e-6,
                               const EvolveOptions& extra = {});

struct ComparisonReport {
  double max_violation = 0.0;  // max over steps of max(lower - upper)
  int steps = 0;
};

// Evolves an ordered pair of states to the horizon and reports the largest
// pointwise order violation seen at any step; roundoff-level values certify
// the discrete comparison principle.  Requires init_low <= init_high.
ComparisonReport check_comparison(const Parameters& p, const ReactionTerm& term,
                                  const Grid& grid, const State& init_low,
                                  const State& init_high, double horizon,
                                  double dt);

struct UniquenessReport {
  std::vector<std::array<double, 2>> gaps;  // (t, sup |w_a - w_b|)
  double final_gap = 0.0;
  bool contracting = false;  // gap nonincreasing over the second half
  bool within_tol = false;   // final_gap <= tol
};

// Evolves two separated positive bumps (centers (+-2, 1)) to the horizon and
// records the sup-gap between them; contraction of the gap evidences a
// unique attracting positive state.
UniquenessReport check_uniqueness(const Parameters& p, const ReactionTerm& term,
                                  const Grid& grid, double horizon, double dt,
                                  double tol);

}  // namespace roadfield
