#include "roadfield/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "roadfield/util.hpp"

namespace roadfield {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string fmtg(double x) {  // compact deterministic float for report lines
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Runs f(0..n-1), at most `jobs` at a time; indexes partition the work, so
// results merge deterministically.  The first exception wins and rethrows.
template <typename F>
void parallel_for(int n, int jobs, F&& f) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t)
    workers.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& w : workers) w.join();
  if (err) std::rethrow_exception(err);
}

struct EvalResult {
  double lambda = 0.0;
  bool converged = false;
};

EvalResult eval_lambda(const Parameters& p, const NicheProfile& profile,
                       OperatorKind kind, double c,
                       const ExhaustionSchedule& sched) {
  Parameters q = p;
  q.c = c;
  const ExhaustionResult r = exhaust_lambda(q, profile, kind, sched);
  return {r.lambda_inf, r.converged};
}

// Coarse scan of lambda(c) over [0, bound], then sign-change bisection from
// both sides.  The bisection update (lambda >= 0 moves hi, lambda < 0 moves
// lo) is the same for both boundaries, and evaluations are memoized on the
// exact abscissa, so a single-crossing scan yields c_star == c_star_upper
// bit-for-bit.
SpeedPair scan_and_bisect(const std::function<EvalResult(double)>& eval,
                          double bound, double tol, int points, int jobs) {
  if (!(tol > 0.0)) throw ConfigError("speed tolerance must be positive");
  if (points < 3) throw ConfigError("speed scan needs at least 3 points");
  SpeedPair out;
  out.bound = bound;

  std::map<double, EvalResult> memo;
  const auto at = [&](double c) {
    const auto it = memo.find(c);
    if (it != memo.end()) return it->second;
    const EvalResult e = eval(c);
    memo.emplace(c, e);
    if (!e.converged) out.provisional = true;
    return e;
  };

  const EvalResult e0 = at(0.0);
  out.scan.push_back({0.0, e0.lambda, e0.converged});
  if (e0.lambda >= 0.0) return out;  // extinction at rest: (0, 0) convention
  if (!(bound > 0.0)) {
    out.provisional = true;  // negative eigenvalue but no favorable sup
    return out;
  }

  out.scan.assign(static_cast<std::size_t>(points), ScanPoint{});
  out.scan[0] = {0.0, e0.lambda, e0.converged};
  std::vector<EvalResult> evs(static_cast<std::size_t>(points));
  parallel_for(points - 1, jobs, [&](int i) {
    const int k = i + 1;
    evs[static_cast<std::size_t>(k)] = eval(bound * k / (points - 1));
  });
  for (int k = 1; k < points; ++k) {
    const double c = bound * k / (points - 1);
    const EvalResult& e = evs[static_cast<std::size_t>(k)];
    memo.emplace(c, e);
    if (!e.converged) out.provisional = true;
    out.scan[static_cast<std::size_t>(k)] = {c, e.lambda, e.converged};
  }

  const auto bisect = [&](double lo, double hi) {
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (at(mid).lambda >= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    return std::pair<double, double>{0.5 * (lo + hi), hi - lo};
  };

  int k_first = -1;
  for (int k = 1; k < points; ++k)
    if (out.scan[static_cast<std::size_t>(k)].lambda >= 0.0) {
      k_first = k;
      break;
    }
  if (k_first < 0) {
    // lambda < 0 over the whole scan: the a-priori bound itself is the only
    // honest estimate; flag it.
    out.c_star = out.c_star_upper = bound;
    out.bracket_width = bound / (points - 1);
    out.provisional = true;
    return out;
  }
  const auto [c_lo, w_lo] =
      bisect(out.scan[static_cast<std::size_t>(k_first - 1)].c,
             out.scan[static_cast<std::size_t>(k_first)].c);
  out.c_star = c_lo;
  out.bracket_width = w_lo;

  int k_last = 0;
  for (int k = points - 1; k >= 0; --k)
    if (out.scan[static_cast<std::size_t>(k)].lambda < 0.0) {
      k_last = k;
      break;
    }
  if (k_last == points - 1) {
    out.c_star_upper = bound;  // lambda(bound) < 0: numerically out of reach
    out.provisional = true;
  } else {
    const auto [c_hi, w_hi] =
        bisect(out.scan[static_cast<std::size_t>(k_last)].c,
               out.scan[static_cast<std::size_t>(k_last + 1)].c);
    out.c_star_upper = c_hi;
    out.bracket_width = std::max(out.bracket_width, w_hi);
  }
  if (out.c_star > out.c_star_upper + 1e-12)
    throw NumericsError("speed bisection produced c_star > c_star_upper");
  out.c_star_upper = std::max(out.c_star_upper, out.c_star);
  return out;
}

double speed_bound(double dmax, const NicheProfile& profile) {
  return 2.0 * std::sqrt(dmax * std::max(profile.sup(), 0.0));
}

void require_bfz(const NicheProfile& profile, const char* what) {
  const double far =
      profile.far_field_bound(default_validation_radius(profile));
  if (!(far < 0.0))
    throw ConfigError(std::string(what) +
                      " needs a niche unfavorable at infinity (far-field "
                      "bound " +
                      fmtg(far) + " >= 0)");
}

}  // namespace

// ---- critical speeds ----------------------------------------------------

double lambda_of_c(const Parameters& p, const NicheProfile& profile,
                   OperatorKind kind, double c,
                   const ExhaustionSchedule& sched) {
  if (!(c >= 0.0)) throw ConfigError("frame speed must be >= 0");
  return eval_lambda(p, profile, kind, c, sched).lambda;
}

SpeedPair critical_speeds(const Parameters& p, const NicheProfile& profile,
                          double tol, const ExhaustionSchedule& sched,
                          int scan_points, int jobs) {
  p.validate();
  require_bfz(profile, "critical_speeds");
  const double bound = speed_bound(std::max(p.d, p.D), profile);
  const auto eval = [&](double c) {
    return eval_lambda(p, profile, OperatorKind::Coupled, c, sched);
  };
  return scan_and_bisect(eval, bound, tol, scan_points, jobs);
}

double critical_speed_no_road(double d, const NicheProfile& profile,
                              double tol, const ExhaustionSchedule& sched,
                              int jobs) {
  if (!(d > 0.0)) throw ConfigError("field diffusivity must be > 0");
  require_bfz(profile, "critical_speed_no_road");
  Parameters p;
  p.d = d;
  const double bound = speed_bound(d, profile);
  const auto eval = [&](double c) {
    return eval_lambda(p, profile, OperatorKind::Neumann, c, sched);
  };
  return scan_and_bisect(eval, bound, tol, 21, jobs).c_star;
}

double diffusion_threshold(const Parameters& p, const NicheProfile& profile,
                           double d_max, double tol,
                           const ExhaustionSchedule& sched) {
  if (p.c != 0.0)
    throw ConfigError(
        "diffusion_threshold is defined at c = 0 (lambda is monotone in d "
        "there)");
  if (!(tol > 0.0) || !(d_max > tol))
    throw ConfigError("diffusion_threshold needs 0 < tol < d_max");
  const auto lam = [&](double d) {
    Parameters q = p;
    q.d = d;
    q.validate();
    return exhaust_lambda(q, profile, OperatorKind::Coupled, sched).lambda_inf;
  };
  const double lam_hi = lam(d_max);
  if (lam_hi < 0.0)
    throw NumericsError("lambda(d_max = " + fmtg(d_max) + ") = " +
                        fmtg(lam_hi) + " < 0; raise d_max");
  if (lam(tol) >= 0.0) return 0.0;  // extinction at every probed diffusivity
  double lo = tol;
  double hi = d_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (lam(mid) >= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// ---- homogeneous medium ---------------------------------------------------

namespace {

ExhaustionSchedule homogeneous_schedule(double growth) {
  // Fixed reference ladder: 16 -> 32 half-widths at h = 1/4 (the desk-scale
  // grid cap).  The homogeneous profile never satisfies the exhaustion
  // stopping rule, so the largest domain's value is used as-is.
  ExhaustionSchedule s;
  s.x0 = 16.0;
  s.growth = growth;
  s.max_steps = 3;
  s.spacing = 0.25;
  s.max_x = 32.0;
  s.stop_tol = 1e-4;
  return s;
}

}  // namespace

double lambda_homogeneous(const Parameters& p, double c, double growth) {
  Parameters q = p;
  q.c = c;
  return exhaust_lambda(q, NicheProfile::constant(1.0, true),
                        OperatorKind::Coupled, homogeneous_schedule(growth))
      .lambda_inf;
}

double c_kpp(double d) {
  if (!(d > 0.0)) throw ConfigError("field diffusivity must be > 0");
  return 2.0 * std::sqrt(d);
}

double homogeneous_speed_cH(const Parameters& p, double tol, double growth) {
  p.validate();
  if (!(tol > 0.0)) throw ConfigError("speed tolerance must be positive");
  const double bound = 2.0 * std::sqrt(std::max(p.d, p.D));  // sup m == 1
  double lo = 0.95 * c_kpp(p.d);  // c_H >= c_KPP always
  if (lambda_homogeneous(p, lo, growth) >= 0.0) lo = 0.0;
  if (lambda_homogeneous(p, bound, growth) < 0.0)
    return bound;  // root sits at the a-priori bound within truncation error
  double hi = bound;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (lambda_homogeneous(p, mid, growth) >= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

DerivedConstants derived_constants(const Parameters& p,
                                   const NicheProfile& profile, double tol,
                                   double d_max,
                                   const ExhaustionSchedule& sched) {
  DerivedConstants out;
  out.c_kpp = c_kpp(p.d);
  out.c_h = homogeneous_speed_cH(p, tol);
  out.c_n = critical_speed_no_road(p.d, profile, tol, sched);
  Parameters q = p;
  q.c = 0.0;  // the threshold is a rest-frame notion
  out.d_star = diffusion_threshold(q, profile, d_max, tol, sched);
  return out;
}

// ---- sweeps ---------------------------------------------------------------

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::c:
      return "c";
    case SweepAxis::L:
      return "L";
    case SweepAxis::d:
      return "d";
    case SweepAxis::D:
      return "D";
    case SweepAxis::mu:
      return "mu";
    case SweepAxis::nu:
      return "nu";
  }
  return "?";
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "c") return SweepAxis::c;
  if (name == "L") return SweepAxis::L;
  if (name == "d") return SweepAxis::d;
  if (name == "D") return SweepAxis::D;
  if (name == "mu") return SweepAxis::mu;
  if (name == "nu") return SweepAxis::nu;
  throw ConfigError("unknown sweep axis '" + name +
                    "' (expected c, L, d, D, mu or nu)");
}

void SweepTable::write_csv(std::ostream& out) const {
  out << "axis,value,lambda,lambda_neumann,converged";
  if (has_verdicts) out << ",verdict";
  out << '\n';
  for (const SweepRow& row : rows) {
    out << to_string(axis) << ',' << fmt17(row.value) << ',';
    if (row.lambda) out << fmt17(*row.lambda);
    out << ',';
    if (row.lambda_neumann) out << fmt17(*row.lambda_neumann);
    out << ',' << (row.converged ? "true" : "false");
    if (has_verdicts) {
      out << ',';
      if (row.verdict) out << to_string(*row.verdict);
    }
    out << '\n';
  }
}

SweepTable sweep(SweepAxis axis, const std::vector<double>& values,
                 const Parameters& p, const NicheProfile& profile,
                 bool with_verdicts, const SweepOptions& opts) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k]))
      throw ConfigError("sweep values must be finite");
    if (k > 0 && values[k] < values[k - 1])
      throw ConfigError("sweep values must be sorted ascending");
  }
  if (axis == SweepAxis::L && profile.kind() != NicheKind::RadialFL)
    throw ConfigError(
        "an L sweep re-centers a radial niche; niche.kind must be radial_fl");

  SweepTable table;
  table.axis = axis;
  table.has_verdicts = with_verdicts;
  table.rows.resize(values.size());
  parallel_for(static_cast<int>(values.size()), opts.jobs, [&](int i) {
    SweepRow& row = table.rows[static_cast<std::size_t>(i)];
    row.value = values[static_cast<std::size_t>(i)];
    try {
      Parameters q = p;
      NicheProfile prof = profile;
      switch (axis) {
        case SweepAxis::c:
          q.c = row.value;
          break;
        case SweepAxis::L:
          prof = NicheProfile::radial_fl(row.value);
          break;
        case SweepAxis::d:
          q.d = row.value;
          break;
        case SweepAxis::D:
          q.D = row.value;
          break;
        case SweepAxis::mu:
          q.mu = row.value;
          break;
        case SweepAxis::nu:
          q.nu = row.value;
          break;
      }
      q.validate();
      const ExhaustionResult ex =
          exhaust_lambda(q, prof, OperatorKind::Coupled, opts.sched);
      row.lambda = ex.lambda_inf;
      row.converged = ex.converged;
      row.final_x = ex.ladder.back().x;
      if (opts.with_neumann)
        row.lambda_neumann =
            exhaust_lambda(q, prof, OperatorKind::Neumann, opts.sched)
                .lambda_inf;
      if (with_verdicts) {
        const Grid g = Grid::build(ex.ladder.back().x, ex.ladder.back().y,
                                   opts.sched.spacing);
        row.verdict = evolve_classify(q, ReactionTerm{prof}, g, opts.horizon,
                                      opts.dt, opts.steady_tol)
                          .verdict;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return table;
}

std::vector<double> parse_range(const std::string& text) {
  const auto bad = [&](const std::string& why) {
    throw ConfigError("values '" + text + "': " + why);
  };
  const auto number = [&](const std::string& s) {
    if (s.empty()) bad("empty number");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) bad("'" + s + "' is not a number");
    if (!std::isfinite(v)) bad("'" + s + "' is not finite");
    return v;
  };
  const auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t from = 0;
    for (;;) {
      const std::size_t pos = s.find(sep, from);
      parts.push_back(s.substr(from, pos - from));
      if (pos == std::string::npos) return parts;
      from = pos + 1;
    }
  };

  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) bad("expected start:stop:count");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double count_raw = number(parts[2]);
    if (count_raw < 1 || count_raw > 100000 ||
        count_raw != std::floor(count_raw))
      bad("count must be an integer in [1, 100000]");
    const int count = static_cast<int>(count_raw);
    if (count == 1) return {start};
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
      out[static_cast<std::size_t>(k)] =
          start + (stop - start) * k / (count - 1);
    return out;
  }
  std::vector<double> out;
  for (const std::string& s : split(text, ',')) out.push_back(number(s));
  if (out.empty()) bad("no values");
  return out;
}

// ---- verification battery --------------------------------------------------

namespace {

struct CheckContext {
  std::uint64_t seed = 0;
  int jobs = 1;
};

CheckResult result(const char* name, bool pass, double margin,
                   std::string detail) {
  CheckResult r;
  r.name = name;
  r.pass = pass;
  r.margin = margin;
  r.detail = std::move(detail);
  return r;
}

Parameters base_params(double D, double d, double mu, double nu, double c) {
  Parameters p;
  p.D = D;
  p.d = d;
  p.mu = mu;
  p.nu = nu;
  p.c = c;
  return p;
}

ExhaustionSchedule single_rung(double x, double h) {
  ExhaustionSchedule s;
  s.x0 = x;
  s.spacing = h;
  s.max_steps = 1;
  return s;
}

ExhaustionSchedule rung_ladder(double x0, double growth, int steps, double h,
                               double stop_tol) {
  ExhaustionSchedule s;
  s.x0 = x0;
  s.growth = growth;
  s.max_steps = steps;
  s.spacing = h;
  s.stop_tol = stop_tol;
  return s;
}

double lambda_on(const Grid& g, const Parameters& p, const NicheProfile& prof,
                 OperatorKind kind) {
  SparseOperator op;
  switch (kind) {
    case OperatorKind::Coupled:
      op = assemble_coupled(g, p, prof);
      break;
    case OperatorKind::Neumann:
      op = assemble_neumann(g, p.d, p.c, prof);
      break;
    case OperatorKind::Robin:
      op = assemble_robin(g, p.d, p.c, p.nu, prof);
      break;
  }
  return principal_eigenpair(op).lambda;
}

// Criterion: the no-road operator with m == 0 on [-1,1]x[0,1] is separable
// with smallest eigenvalue (pi/2)^2 + (pi/2)^2 = pi^2/2; second order in h.
CheckResult check_separable(const CheckContext&) {
  const double target = kPi * kPi / 2.0;
  const NicheProfile zero = NicheProfile::constant(0.0, true);
  const double hs[3] = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  double errs[3];
  for (int k = 0; k < 3; ++k) {
    const Grid g = Grid::build(1.0, 1.0, hs[k]);
    errs[k] = std::abs(
        lambda_on(g, base_params(1, 1, 1, 1, 0), zero, OperatorKind::Neumann) -
        target);
  }
  const double order =
      std::min(std::log2(errs[0] / errs[1]), std::log2(errs[1] / errs[2]));
  const double rel = errs[2] / target;
  const bool pass = order >= 1.8 && rel <= 0.02;
  return result("separable-eigenvalue", pass,
                std::min(order - 1.8, 0.02 - rel),
                "observed order " + fmtg(order) + ", rel err " + fmtg(rel) +
                    " at h=1/64 vs pi^2/2");
}

// Criterion: iterative solver matches the dense eigendecomposition on tiny
// grids across kinds and speeds.
CheckResult check_oracle(const CheckContext& ctx) {
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> diff(0.3, 3.0);
  std::uniform_real_distribution<double> rate(0.2, 2.0);
  std::uniform_real_distribution<double> radius(-1.0, 1.5);
  const double dims[4][3] = {
      {1.0, 1.0, 0.5}, {1.5, 1.0, 0.5}, {1.0, 1.5, 0.5}, {2.5, 1.0, 0.5}};
  double worst_l = 0.0;
  double worst_v = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto& dm = dims[i % 4];
    const Grid g = Grid::build(dm[0], dm[1], dm[2]);
    const Parameters p = base_params(diff(rng), diff(rng), rate(rng),
                                     rate(rng), (i % 2) ? 1.0 : 0.0);
    const NicheProfile prof = NicheProfile::radial_fl(radius(rng));
    SparseOperator op;
    switch (i % 3) {
      case 0:
        op = assemble_coupled(g, p, prof);
        break;
      case 1:
        op = assemble_neumann(g, p.d, p.c, prof);
        break;
      default:
        op = assemble_robin(g, p.d, p.c, p.nu, prof);
        break;
    }
    const EigenResult it = principal_eigenpair(op);
    const EigenResult ref = dense_oracle(op);
    worst_l = std::max(worst_l, std::abs(it.lambda - ref.lambda));
    worst_v =
        std::max(worst_v, (it.vector - ref.vector).cwiseAbs().maxCoeff());
  }
  const bool pass = worst_l <= 1e-9 && worst_v <= 1e-8;
  return result("oracle-equivalence", pass,
                std::min(1e-9 - worst_l, 1e-8 - worst_v),
                "20 configs: worst |dlambda| " + fmtg(worst_l) +
                    ", worst |dvec| " + fmtg(worst_v));
}

// Criterion: for d == D the frame speed shifts the eigenvalue by exactly
// c^2/(4d) (matched truncation, so the identity is clean).
CheckResult check_shift(const CheckContext&) {
  double worst = -std::numeric_limits<double>::infinity();
  std::string at;
  for (const double d : {0.5, 1.0, 2.0}) {
    const double h = d == 0.5 ? 0.1 : 0.125;
    const Grid g = Grid::build(10.0, 10.0, h);
    const NicheProfile prof = NicheProfile::radial_fl(3.0);
    const double lam0 =
        lambda_on(g, base_params(d, d, 1, 1, 0), prof, OperatorKind::Coupled);
    for (const double c : {0.5, 1.0, 2.0}) {
      const double lam =
          lambda_on(g, base_params(d, d, 1, 1, c), prof, OperatorKind::Coupled);
      const double target = c * c / (4.0 * d);
      const double rel = std::abs(lam - lam0 - target) / target;
      if (rel > worst) {
        worst = rel;
        at = "d=" + fmtg(d) + ", c=" + fmtg(c);
      }
    }
  }
  return result("shift-identity", worst <= 0.02, 0.02 - worst,
                "worst rel err " + fmtg(worst) + " at " + at);
}

// Criterion: computed upper critical speed never exceeds the a-priori bound
// 2 sqrt(max{d,D} [sup m]+); the crossing itself must be bracketed.
CheckResult check_speed_bound(const CheckContext& ctx) {
  const double tol = 0.05;
  const double configs[5][2] = {
      {0.5, 1.0}, {1.0, 1.0}, {4.0, 1.0}, {10.0, 1.0}, {2.0, 4.0}};
  const NicheProfile prof = NicheProfile::radial_fl(8.0);
  const ExhaustionSchedule sched = rung_ladder(10.0, 1.5, 2, 0.25, 1e-3);
  double margin = std::numeric_limits<double>::infinity();
  std::string detail = "c_star_upper/bound:";
  bool pass = true;
  for (const auto& cfg : configs) {
    const SpeedPair sp = critical_speeds(base_params(cfg[0], cfg[1], 1, 1, 0),
                                         prof, tol, sched, 21, ctx.jobs);
    margin = std::min(margin, sp.bound + 2 * tol - sp.c_star_upper);
    pass = pass && sp.c_star_upper <= sp.bound + 2 * tol && sp.c_star > 0.0;
    detail += " " + fmtg(sp.c_star_upper) + "/" + fmtg(sp.bound);
  }
  return result("speed-bound", pass, margin, detail);
}

// Criterion: lambda(c) >= c^2/(4 max{d,D}) - [sup m]+ - tol along the scan
// (the kappa-weighted test-function bound; truncation only raises lambda).
CheckResult check_kappa_bound(const CheckContext& ctx) {
  const double tol = 0.02;
  const double configs[3][3] = {{1, 1, 2}, {4, 1, 3}, {1, 2, 3}};  // D, d, L
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& cfg : configs) {
    const Parameters p = base_params(cfg[0], cfg[1], 1, 1, 0);
    const NicheProfile prof = NicheProfile::radial_fl(cfg[2]);
    const double supm = std::max(prof.sup(), 0.0);
    const double dmax = std::max(p.d, p.D);
    const double bound = 2.0 * std::sqrt(dmax * supm);
    const ExhaustionSchedule sched = single_rung(8.0, 0.25);
    std::vector<double> lams(21);
    parallel_for(21, ctx.jobs, [&](int k) {
      lams[static_cast<std::size_t>(k)] =
          lambda_of_c(p, prof, OperatorKind::Coupled, bound * k / 20, sched);
    });
    for (int k = 0; k < 21; ++k) {
      const double c = bound * k / 20;
      const double floor = c * c / (4.0 * dmax) - supm;
      margin = std::min(margin,
                        lams[static_cast<std::size_t>(k)] - floor + tol);
    }
  }
  return result("kappa-bound", margin >= 0.0, margin,
                "3 configs x 21 speeds, min slack " + fmtg(margin - tol) +
                    " before tol " + fmtg(tol));
}

// Criterion: lambda(c) attains its minimum at c = 0 (up to scan slack).
CheckResult check_min_at_zero(const CheckContext& ctx) {
  const double slack = 2e-3;
  const double configs[2][3] = {{1, 1, 3}, {10, 1, 8}};  // D, d, L
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& cfg : configs) {
    const Parameters p = base_params(cfg[0], cfg[1], 1, 1, 0);
    const NicheProfile prof = NicheProfile::radial_fl(cfg[2]);
    const double bound = speed_bound(std::max(p.d, p.D), prof);
    const ExhaustionSchedule sched = single_rung(10.0, 0.25);
    std::vector<double> lams(21);
    parallel_for(21, ctx.jobs, [&](int k) {
      lams[static_cast<std::size_t>(k)] =
          lambda_of_c(p, prof, OperatorKind::Coupled, bound * k / 20, sched);
    });
    for (int k = 1; k < 21; ++k)
      margin = std::min(margin, lams[static_cast<std::size_t>(k)] - lams[0] +
                                    slack);
  }
  return result("min-at-zero", margin >= 0.0, margin,
                "2 configs x 21 speeds, min lambda(c)-lambda(0) " +
                    fmtg(margin - slack) + " before slack " + fmtg(slack));
}

// Criterion: at c = 0 the exhausted eigenvalue never exceeds mu (the road
// absorbs at most its own exchange rate).
CheckResult check_lambda_le_mu(const CheckContext&) {
  const double configs[5][2] = {
      {2.0, 0.2}, {3.0, 0.2}, {0.0, 1.0}, {3.0, 1.0}, {1.0, 5.0}};  // L, mu
  const ExhaustionSchedule sched = rung_ladder(8.0, 1.5, 3, 0.25, 1e-3);
  double margin = std::numeric_limits<double>::infinity();
  std::string detail = "lambda vs mu:";
  for (const auto& cfg : configs) {
    const Parameters p = base_params(1, 1, cfg[1], 1, 0);
    const double lam = lambda_of_c(p, NicheProfile::radial_fl(cfg[0]),
                                   OperatorKind::Coupled, 0.0, sched);
    margin = std::min(margin, cfg[1] + sched.stop_tol - lam);
    detail += " " + fmtg(lam) + "<=" + fmtg(cfg[1]);
  }
  return result("lambda-le-mu", margin >= 0.0, margin, detail);
}

// Criterion: on a matched grid at c = 0, lambda is nonincreasing in L and
// nondecreasing in d and in D.
CheckResult check_monotonicity(const CheckContext& ctx) {
  const Grid g = Grid::build(12.0, 12.0, 0.25);
  const double slack = 1e-6;
  double margin = std::numeric_limits<double>::infinity();

  std::vector<double> lamL(11);
  parallel_for(11, ctx.jobs, [&](int k) {
    lamL[static_cast<std::size_t>(k)] =
        lambda_on(g, base_params(1, 1, 1, 1, 0),
                  NicheProfile::radial_fl(-2.0 + k), OperatorKind::Coupled);
  });
  for (int k = 0; k + 1 < 11; ++k)
    margin = std::min(margin, lamL[static_cast<std::size_t>(k)] -
                                  lamL[static_cast<std::size_t>(k + 1)] +
                                  slack);

  const NicheProfile prof = NicheProfile::radial_fl(3.0);
  const double diffs[5] = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> lamd(5), lamD(5);
  parallel_for(5, ctx.jobs, [&](int k) {
    lamd[static_cast<std::size_t>(k)] = lambda_on(
        g, base_params(1, diffs[k], 1, 1, 0), prof, OperatorKind::Coupled);
    lamD[static_cast<std::size_t>(k)] = lambda_on(
        g, base_params(diffs[k], 1, 1, 1, 0), prof, OperatorKind::Coupled);
  });
  for (int k = 0; k + 1 < 5; ++k) {
    margin = std::min(margin, lamd[static_cast<std::size_t>(k + 1)] -
                                  lamd[static_cast<std::size_t>(k)] + slack);
    margin = std::min(margin, lamD[static_cast<std::size_t>(k + 1)] -
                                  lamD[static_cast<std::size_t>(k)] + slack);
  }
  return result("monotonicity", margin >= 0.0, margin,
                "L nonincreasing (11 pts), d and D nondecreasing (5 pts each),"
                " min ordered gap " +
                    fmtg(margin - slack) + " before slack");
}

// Criterion: whenever the no-road eigenvalue is nonnegative, so is the
// coupled one (the road cannot rescue a doomed niche) -- checked on a 60
// point (L, D, mu, nu) lattice at matched truncation.
CheckResult check_road_deleterious(const CheckContext& ctx) {
  const Grid g = Grid::build(8.0, 8.0, 0.25);
  const double Ls[5] = {0.5, 1.0, 1.5, 2.0, 2.5};
  const double Ds[3] = {0.5, 2.0, 8.0};
  const double rates[4][2] = {{1, 1}, {2, 0.5}, {0.5, 2}, {1, 0.3}};
  double lamN[5];
  parallel_for(5, ctx.jobs, [&](int k) {
    lamN[k] = lambda_on(g, base_params(1, 1, 1, 1, 0),
                        NicheProfile::radial_fl(Ls[k]), OperatorKind::Neumann);
  });
  std::vector<double> lam1(60);
  parallel_for(60, ctx.jobs, [&](int idx) {
    const int li = idx / 12;
    const int di = (idx / 4) % 3;
    const int ri = idx % 4;
    lam1[static_cast<std::size_t>(idx)] =
        lambda_on(g, base_params(Ds[di], 1, rates[ri][0], rates[ri][1], 0),
                  NicheProfile::radial_fl(Ls[li]), OperatorKind::Coupled);
  });
  int bad = 0;
  int armed = 0;
  double margin = std::numeric_limits<double>::infinity();
  for (int idx = 0; idx < 60; ++idx) {
    const int li = idx / 12;
    if (lamN[li] >= 0.0) {
      ++armed;
      margin = std::min(margin, lam1[static_cast<std::size_t>(idx)]);
      if (lam1[static_cast<std::size_t>(idx)] < 0.0) ++bad;
    }
  }
  return result("road-deleterious", bad == 0 && armed > 0, margin,
                fmtg(armed) + "/60 rows have lambda_N >= 0; min coupled "
                              "lambda there " +
                    fmtg(margin) + "; violations " + fmtg(bad));
}

// Criterion: there is a niche the field alone sustains but the road kills
// (lambda_N < -0.01 < +0.01 < lambda_1); found by a small constructive
// search around the no-road zero crossing.
CheckResult check_road_harmful(const CheckContext&) {
  const Grid g = Grid::build(12.0, 12.0, 0.25);
  const double Ls[5] = {1.6, 1.8, 2.0, 2.2, 2.4};
  const double Ds[3] = {0.5, 1.0, 2.0};
  for (const double L : Ls) {
    const NicheProfile prof = NicheProfile::radial_fl(L);
    const double lamN =
        lambda_on(g, base_params(1, 1, 1, 1, 0), prof, OperatorKind::Neumann);
    if (!(lamN < -0.01)) continue;
    for (const double D : Ds) {
      const double lam1 = lambda_on(g, base_params(D, 1, 1, 1, 0), prof,
                                    OperatorKind::Coupled);
      if (lam1 > 0.01)
        return result("road-harmful", true,
                      std::min(-0.01 - lamN, lam1 - 0.01),
                      "L=" + fmtg(L) + ", D=" + fmtg(D) + ": lambda_N " +
                          fmtg(lamN) + ", lambda_1 " + fmtg(lam1));
    }
  }
  return result("road-harmful", false, -1.0,
                "no (L, D) with lambda_N < -0.01 < 0.01 < lambda_1 in the "
                "search window");
}

// Criterion: the diffusion threshold exists, is positive for a real niche,
// vanishes for a hostile one, and the large-d regime has lambda >= 0.
CheckResult check_threshold_d(const CheckContext&) {
  const Parameters p = base_params(1, 1, 1, 1, 0);
  const double ds = diffusion_threshold(p, NicheProfile::radial_fl(5.0), 20.0,
                                        1e-2, single_rung(24.0, 0.5));
  const double lam100 =
      lambda_on(Grid::build(48.0, 48.0, 1.0), base_params(1, 100, 1, 1, 0),
                NicheProfile::radial_fl(5.0), OperatorKind::Coupled);
  const double ds_hostile = diffusion_threshold(
      p, NicheProfile::radial_fl(-5.0), 20.0, 1e-2, single_rung(12.0, 0.5));
  const bool pass = ds > 0.0 && lam100 >= 0.0 && ds_hostile == 0.0;
  return result("threshold-d", pass, std::min(ds, lam100),
                "d_star " + fmtg(ds) + " (bracket 1e-2), lambda(d=100) " +
                    fmtg(lam100) + ", hostile-niche d_star " +
                    fmtg(ds_hostile));
}

// Criterion: for a large enough niche, persistence holds no matter how fast
// the road diffuses; L is found by scanning the worst case D = 100.
CheckResult check_persistence_all_D(const CheckContext&) {
  const Grid worst = Grid::build(32.0, 32.0, 0.5);
  double Lstar = 0.0;
  for (const double L : {4.0, 7.0, 10.0}) {
    const double lam = lambda_on(worst, base_params(100, 1, 1, 1, 0),
                                 NicheProfile::radial_fl(L),
                                 OperatorKind::Coupled);
    if (lam < -0.1) {
      Lstar = L;
      break;
    }
  }
  if (Lstar == 0.0)
    return result("persistence-all-d", false, -1.0,
                  "no L <= 10 with lambda(D=100) < -0.1");
  const NicheProfile prof = NicheProfile::radial_fl(Lstar);
  const double l1 = lambda_on(Grid::build(16.0, 16.0, 0.25),
                              base_params(1, 1, 1, 1, 0), prof,
                              OperatorKind::Coupled);
  const double l10 = lambda_on(Grid::build(20.0, 20.0, 0.25),
                               base_params(10, 1, 1, 1, 0), prof,
                               OperatorKind::Coupled);
  const double l100 = lambda_on(worst, base_params(100, 1, 1, 1, 0), prof,
                                OperatorKind::Coupled);
  const double worst_lam = std::max({l1, l10, l100});
  return result("persistence-all-d", worst_lam < 0.0, -worst_lam,
                "L=" + fmtg(Lstar) + ": lambda at D=1,10,100 = " + fmtg(l1) +
                    ", " + fmtg(l10) + ", " + fmtg(l100));
}

// Criterion: the homogeneous road-enhanced speed matches 2 sqrt(d) when
// D <= 2d and strictly exceeds it when D >> 2d; stable across ladders.
CheckResult check_homogeneous_speed(const CheckContext&) {
  const double tol = 0.02;
  const double c22 = homogeneous_speed_cH(base_params(2, 1, 1, 1, 0), tol);
  const double c22b =
      homogeneous_speed_cH(base_params(2, 1, 1, 1, 0), tol, 2.0);
  const double c10 = homogeneous_speed_cH(base_params(10, 1, 1, 1, 0), tol);
  const double rel22 = std::abs(c22 - 2.0) / 2.0;
  const double excess10 = c10 / 2.0 - 1.0;
  const double sched_gap = std::abs(c22 - c22b);
  const bool pass = rel22 <= 0.03 && excess10 >= 0.05 && sched_gap <= 2 * tol;
  return result(
      "homogeneous-speed", pass,
      std::min({0.03 - rel22, excess10 - 0.05, 2 * tol - sched_gap}),
      "c_H(D=2d) = " + fmtg(c22) + " (rel err " + fmtg(rel22) +
          ", ladder gap " + fmtg(sched_gap) + "), c_H(D=10d) = " + fmtg(c10));
}

// Criterion: with a fast road and a large niche there are frame speeds the
// field alone cannot survive but the coupled system can (c_N < c_star).
CheckResult check_climate_road_benefit(const CheckContext& ctx) {
  const NicheProfile prof = NicheProfile::radial_fl(8.0);
  const ExhaustionSchedule neumann_sched = single_rung(16.0, 0.25);
  const ExhaustionSchedule coupled_sched = single_rung(16.0, 0.25);
  const double cn =
      critical_speed_no_road(1.0, prof, 0.02, neumann_sched, ctx.jobs);
  const Parameters p = base_params(10, 1, 1, 1, 0);
  for (const double dc : {0.05, 0.15, 0.3}) {
    const double c = cn + dc;
    const double lamN =
        lambda_of_c(p, prof, OperatorKind::Neumann, c, neumann_sched);
    const double lam1 =
        lambda_of_c(p, prof, OperatorKind::Coupled, c, coupled_sched);
    if (lamN >= 0.01 && lam1 <= -0.01) {
      // lambda_1 < 0 below the probe as well: the coupled system persists on
      // the whole segment, so c_star exceeds the probe speed.
      double below_max = -std::numeric_limits<double>::infinity();
      for (const double cb : {0.0, 0.5 * c, 0.85 * c})
        below_max = std::max(below_max, lambda_of_c(p, prof,
                                                    OperatorKind::Coupled, cb,
                                                    coupled_sched));
      const bool pass = below_max < 0.0;
      return result("climate-road-benefit", pass,
                    std::min({lamN - 0.01, -0.01 - lam1, -below_max}),
                    "c_N " + fmtg(cn) + "; at c = " + fmtg(c) +
                        ": lambda_N " + fmtg(lamN) + ", lambda_1 " +
                        fmtg(lam1));
    }
  }
  return result("climate-road-benefit", false, -1.0,
                "no probe above c_N = " + fmtg(cn) +
                    " had lambda_N >= 0.01 and lambda_1 <= -0.01");
}

// Criterion: c_star(L) is nondecreasing and approaches the homogeneous
// speed c_H = 2 sqrt(d) (d = D = 1, so c_H = c_KPP exactly).
CheckResult check_cstar_ladder(const CheckContext& ctx) {
  const double ch = 2.0;
  const double Ls[4] = {4.0, 8.0, 16.0, 32.0};
  const double xs[4] = {12.0, 16.0, 24.0, 40.0};
  const double hs[4] = {0.25, 0.25, 0.5, 0.5};
  double cs[4];
  for (int k = 0; k < 4; ++k)
    cs[k] = critical_speeds(base_params(1, 1, 1, 1, 0),
                            NicheProfile::radial_fl(Ls[k]), 0.01,
                            single_rung(xs[k], hs[k]), 11, ctx.jobs)
                .c_star;
  double margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < 4; ++k) margin = std::min(margin, cs[k + 1] - cs[k]);
  const double shrink = std::abs(cs[1] - ch) - std::abs(cs[3] - ch);
  margin = std::min(margin, shrink);
  return result("cstar-ladder", margin >= 0.0, margin,
                "c_star(L=4,8,16,32) = " + fmtg(cs[0]) + ", " + fmtg(cs[1]) +
                    ", " + fmtg(cs[2]) + ", " + fmtg(cs[3]) +
                    "; gap to c_H=2 shrinks by " + fmtg(shrink));
}

// Criterion: with a huge niche the coupled eigenvalue approaches the
// homogeneous one at matched speeds.
CheckResult check_lambda_homogeneous_limit(const CheckContext&) {
  const Parameters p = base_params(1, 1, 1, 1, 0);
  const NicheProfile prof = NicheProfile::radial_fl(32.0);
  const ExhaustionSchedule sched = single_rung(40.0, 0.5);
  double margin = std::numeric_limits<double>::infinity();
  std::string detail;
  for (const double c : {0.0, 1.0}) {
    const double lam = lambda_of_c(p, prof, OperatorKind::Coupled, c, sched);
    const double lamh = lambda_homogeneous(p, c);
    const double rel = std::abs(lam - lamh) / std::abs(lamh);
    margin = std::min(margin, 0.10 - rel);
    detail += (detail.empty() ? "" : "; ") + ("c=" + fmtg(c)) + ": " +
              fmtg(lam) + " vs " + fmtg(lamh) + " (rel " + fmtg(rel) + ")";
  }
  return result("lambda-homogeneous-limit", margin >= 0.0, margin, detail);
}

// Criterion: the verdict of the bracket evolution matches the eigenvalue
// sign on both sides of the dichotomy, brackets meet, and the steady state
// is unique.
CheckResult check_dichotomy(const CheckContext&) {
  const Grid g = Grid::build(18.0, 18.0, 0.25);
  const Grid gu = Grid::build(12.0, 12.0, 0.25);
  const Parameters p = base_params(1, 1, 1, 1, 0);
  const double persist[4] = {3.0, 4.0, 5.0, 6.0};
  const double extinct[4] = {-1.0, 0.0, 0.5, 1.0};
  double margin = std::numeric_limits<double>::infinity();
  std::string fails;
  for (const double L : persist) {
    const ReactionTerm term{NicheProfile::radial_fl(L)};
    const Classification cl = evolve_classify(p, term, g, 60.0, 0.05, 1e-3);
    const UniquenessReport uq = check_uniqueness(p, term, gu, 60.0, 0.05, 1e-3);
    const bool ok = cl.verdict == Verdict::Persistence && cl.lambda < -0.02 &&
                    cl.bracket_gap <= 1e-3 && uq.within_tol && uq.contracting;
    if (!ok) fails += " L=" + fmtg(L) + "(" + to_string(cl.verdict) + ")";
    margin = std::min({margin, -0.02 - cl.lambda, 1e-3 - cl.bracket_gap,
                       1e-3 - uq.final_gap});
  }
  for (const double L : extinct) {
    const ReactionTerm term{NicheProfile::radial_fl(L)};
    const Classification cl = evolve_classify(p, term, g, 60.0, 0.05, 1e-3);
    const bool ok = cl.verdict == Verdict::Extinction && cl.lambda > 0.02;
    if (!ok) fails += " L=" + fmtg(L) + "(" + to_string(cl.verdict) + ")";
    margin = std::min(margin, cl.lambda - 0.02);
  }
  return result("dichotomy", fails.empty(), margin,
                fails.empty()
                    ? "4 persistence + 4 extinction verdicts match the "
                      "eigenvalue sign; brackets and uniqueness gaps <= 1e-3"
                    : "mismatches:" + fails);
}

// Criterion: the IMEX flow preserves nonnegativity and pointwise order on
// randomized trajectory pairs.
CheckResult check_scheme_properties(const CheckContext& ctx) {
  const Grid g = Grid::build(8.0, 8.0, 0.5);
  const Parameters p = base_params(1, 1, 1, 1, 0);
  const ReactionTerm term{NicheProfile::radial_fl(2.0)};
  const double S = term.saturation();
  std::mt19937_64 rng(ctx.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> uni(0.0, S);
  double min_entry = 0.0;
  double violation = 0.0;
  for (int pair = 0; pair < 10; ++pair) {
    State lo = State::zero(g);
    State hi = State::zero(g);
    for (long i = 0; i < lo.u.size(); ++i) {
      const double a = uni(rng) * p.nu / p.mu;
      const double b = uni(rng) * p.nu / p.mu;
      lo.u[i] = std::min(a, b);
      hi.u[i] = std::max(a, b);
    }
    for (long i = 0; i < lo.v.size(); ++i) {
      const double a = uni(rng);
      const double b = uni(rng);
      lo.v[i] = std::min(a, b);
      hi.v[i] = std::max(a, b);
    }
    for (int k = 0; k < 100; ++k) {
      lo = step(lo, p, term, 0.05);
      hi = step(hi, p, term, 0.05);
      min_entry = std::min({min_entry, lo.min(), hi.min()});
      violation = std::max(
          violation, std::max((lo.u - hi.u).maxCoeff(),
                              (lo.v - hi.v).maxCoeff()));
    }
  }
  const bool pass = min_entry >= -1e-13 && violation <= 1e-10;
  return result("scheme-properties", pass,
                std::min(min_entry + 1e-13, 1e-10 - violation),
                "10 pairs x 100 steps: min entry " + fmtg(min_entry) +
                    ", worst order violation " + fmtg(violation));
}

// Criterion: the c = 0 eigenvalue is the floor of the discrete Rayleigh
// quotient, attained by the eigenvector.
CheckResult check_rayleigh_floor(const CheckContext& ctx) {
  const Grid g = Grid::build(8.0, 8.0, 0.5);
  const Parameters p = base_params(1, 1, 2, 0.5, 0);
  const NicheProfile prof = NicheProfile::radial_fl(2.0);
  const SparseOperator op = assemble_coupled(g, p, prof);
  const EigenResult eig = principal_eigenpair(op);
  const Eigen::VectorXd phi = eig.vector.head(g.nx);
  const Eigen::VectorXd psi = eig.vector.tail(static_cast<long>(g.nx) * g.ny);
  const double rq = rayleigh_quotient(g, p, prof, phi, psi);
  const double identity_err = std::abs(rq - eig.lambda);
  std::mt19937_64 rng(ctx.seed ^ 0x517cc1b727220a95ull);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double floor_margin = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd rphi(g.nx);
    Eigen::VectorXd rpsi(static_cast<long>(g.nx) * g.ny);
    for (long i = 0; i < rphi.size(); ++i) rphi[i] = uni(rng);
    for (long i = 0; i < rpsi.size(); ++i) rpsi[i] = uni(rng);
    floor_margin =
        std::min(floor_margin,
                 rayleigh_quotient(g, p, prof, rphi, rpsi) - eig.lambda);
  }
  const double tol_id = 1e-6 * std::max(1.0, std::abs(eig.lambda));
  const bool pass = identity_err <= tol_id && floor_margin >= -1e-8;
  return result("rayleigh-floor", pass,
                std::min(tol_id - identity_err, floor_margin + 1e-8),
                "eigenpair quotient err " + fmtg(identity_err) +
                    "; min random quotient above lambda by " +
                    fmtg(floor_margin));
}

struct CheckDef {
  const char* name;
  CheckResult (*fn)(const CheckContext&);
};

constexpr CheckDef kChecks[] = {
    {"separable-eigenvalue", check_separable},
    {"oracle-equivalence", check_oracle},
    {"shift-identity", check_shift},
    {"speed-bound", check_speed_bound},
    {"kappa-bound", check_kappa_bound},
    {"min-at-zero", check_min_at_zero},
    {"lambda-le-mu", check_lambda_le_mu},
    {"monotonicity", check_monotonicity},
    {"road-deleterious", check_road_deleterious},
    {"road-harmful", check_road_harmful},
    {"threshold-d", check_threshold_d},
    {"persistence-all-d", check_persistence_all_D},
    {"homogeneous-speed", check_homogeneous_speed},
    {"climate-road-benefit", check_climate_road_benefit},
    {"cstar-ladder", check_cstar_ladder},
    {"lambda-homogeneous-limit", check_lambda_homogeneous_limit},
    {"dichotomy", check_dichotomy},
    {"scheme-properties", check_scheme_properties},
    {"rayleigh-floor", check_rayleigh_floor},
};

}  // namespace

bool VerifyReport::all_pass() const {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<std::string> verify_check_names() {
  std::vector<std::string> out;
  for (const CheckDef& def : kChecks) out.emplace_back(def.name);
  return out;
}

VerifyReport verify_suite(const std::vector<std::string>& names,
                          std::uint64_t seed, int jobs) {
  std::vector<const CheckDef*> selected;
  if (names.empty()) {
    for (const CheckDef& def : kChecks) selected.push_back(&def);
  } else {
    for (const std::string& name : names) {
      const CheckDef* found = nullptr;
      for (const CheckDef& def : kChecks)
        if (name == def.name) {
          found = &def;
          break;
        }
      if (!found) {
        std::string known;
        for (const CheckDef& def : kChecks)
          known += std::string(known.empty() ? "" : ", ") + def.name;
        throw ConfigError("unknown check '" + name + "' (known: " + known +
                          ")");
      }
      selected.push_back(found);
    }
  }
  const CheckContext ctx{seed, std::max(1, jobs)};
  VerifyReport report;
  for (const CheckDef* def : selected) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = def->fn(ctx);
    } catch (const std::exception& e) {
      r.name = def->name;
      r.pass = false;
      r.margin = -1.0;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = seconds_since(t0);
    report.checks.push_back(std::move(r));
  }
  return report;
}

}  // namespace roadfield
