#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "roadfield/dynamics.hpp"
#include "roadfield/eigensolver.hpp"
#include "roadfield/model.hpp"
#include "roadfield/operators.hpp"

// Parameter-space studies built on the exhausted principal eigenvalue:
// critical frame speeds, diffusion thresholds, axis sweeps, the homogeneous
// reference speed, and the verification battery of analytic identities and
// bounds the discretization must reproduce.

namespace roadfield {

// ---- critical speeds --------------------------------------------------

struct ScanPoint {
  double c = 0.0;
  double lambda = 0.0;
  bool converged = false;
};

// Lower/upper critical speeds: persistence for c < c_star, extinction for
// c >= c_star_upper.  Always 0 <= c_star <= c_star_upper <= bound +
// bracket_width, with bound = 2 sqrt(max{d, D} [sup m]+), the a-priori
// extinction speed.
struct SpeedPair {
  double c_star = 0.0;
  double c_star_upper = 0.0;
  double bound = 0.0;
  double bracket_width = 0.0;
  bool provisional = false;  // an eigenvalue failed to converge, or the
                             // scan could not bracket a sign change
  std::vector<ScanPoint> scan;
};

// Exhausted eigenvalue with the frame speed replaced by c.
double lambda_of_c(const Parameters& p, const NicheProfile& profile,
                   OperatorKind kind, double c,
                   const ExhaustionSchedule& sched = {});

// Scans lambda(c) over [0, bound] on `scan_points` points, then bisects the
// first boundary of {lambda >= 0} (c_star) and the last boundary of
// {lambda < 0} (c_star_upper) down to `tol`.  lambda(0) >= 0 returns (0, 0).
// Requires the profile to be unfavorable at infinity.
SpeedPair critical_speeds(const Parameters& p, const NicheProfile& profile,
                          double tol, const ExhaustionSchedule& sched = {},
                          int scan_points = 21, int jobs = 1);

// Same scan/bisection on the no-road (Neumann) operator; returns c_N.
double critical_speed_no_road(double d, const NicheProfile& profile,
                              double tol, const ExhaustionSchedule& sched = {},
                              int jobs = 1);

// Bisects the c = 0 eigenvalue's sign change in the field diffusivity d over
// [tol, d_max] (lambda is nondecreasing in d).  Returns 0 when lambda >= 0
// already at d = tol; throws NumericsError when lambda(d_max) < 0 (d_max
// must be raised).
double diffusion_threshold(const Parameters& p, const NicheProfile& profile,
                           double d_max, double tol,
                           const ExhaustionSchedule& sched = {});

// Root of the homogeneous-medium eigenvalue lambda_H(c) (profile m == 1):
// the road-enhanced spreading speed c_H.  Uses a fixed truncation ladder
// (X: 16 -> 32 by `growth`, h = 1/4); the homogeneous profile never reaches
// exhaustion convergence, so the largest domain's value is authoritative
// and carries the quoted ~1% truncation bias.
double homogeneous_speed_cH(const Parameters& p, double tol,
                            double growth = 1.4142135623730951);

// Eigenvalue of the homogeneous system at speed c on the same fixed ladder.
double lambda_homogeneous(const Parameters& p, double c,
                          double growth = 1.4142135623730951);

// KPP invasion speed 2 sqrt(d) of the field alone (f'(0) = 1).
double c_kpp(double d);

// Reference speeds and thresholds for one configuration.
struct DerivedConstants {
  double c_kpp = 0.0;   // 2 sqrt(d), exact
  double c_h = 0.0;     // homogeneous road-enhanced speed
  double c_n = 0.0;     // no-road critical speed
  double d_star = 0.0;  // diffusion threshold at c = 0
};

DerivedConstants derived_constants(const Parameters& p,
                                   const NicheProfile& profile, double tol,
                                   double d_max,
                                   const ExhaustionSchedule& sched = {});

// ---- sweeps ------------------------------------------------------------

enum class SweepAxis { c, L, d, D, mu, nu };

const char* to_string(SweepAxis axis);
SweepAxis sweep_axis_from_name(const std::string& name);

struct SweepRow {
  double value = 0.0;
  std::optional<double> lambda;          // coupled exhausted eigenvalue
  std::optional<double> lambda_neumann;  // no-road eigenvalue, on request
  bool converged = false;
  double final_x = 0.0;  // last exhaustion truncation used
  std::optional<Verdict> verdict;
  std::string error;  // per-row failure note; empty on success
};

struct SweepOptions {
  ExhaustionSchedule sched;
  bool with_neumann = true;
  double horizon = 500.0;  // verdict probe budget
  double dt = 0.05;
  double steady_tol = 1e-3;
  int jobs = 1;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::c;
  bool has_verdicts = false;
  std::vector<SweepRow> rows;  // sorted by axis value

  // Header `axis,value,lambda,lambda_neumann,converged[,verdict]`; failed
  // cells stay empty.
  void write_csv(std::ostream& out) const;
};

// Exhausted eigenvalues along one parameter axis; values must be finite and
// ascending.  The L axis re-centers a RadialFL profile per row and rejects
// other niche kinds.  Per-row failures are recorded and the sweep continues.
SweepTable sweep(SweepAxis axis, const std::vector<double>& values,
                 const Parameters& p, const NicheProfile& profile,
                 bool with_verdicts = false, const SweepOptions& opts = {});

// Parses "start:stop:count" into `count` evenly spaced values.
std::vector<double> parse_range(const std::string& text);

// ---- verification battery ----------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // signed slack: >= 0 means passed with that much room
  std::string detail;   // one-line human-readable evidence
  double seconds = 0.0; // wall time (reporting only; excluded from artifacts)
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

// Registered check names, in battery order.
std::vector<std::string> verify_check_names();

// Runs the named checks (all of them when `names` is empty).  Unknown names
// throw ConfigError.  `seed` feeds the randomized checks; `jobs` bounds
// concurrent eigenvalue evaluations inside a check.
VerifyReport verify_suite(const std::vector<std::string>& names = {},
                          std::uint64_t seed = 20240704ull, int jobs = 1);

}  // namespace roadfield
