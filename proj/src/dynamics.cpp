#include "roadfield/dynamics.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "roadfield/eigensolver.hpp"
#include "roadfield/kernels.hpp"
#include "roadfield/util.hpp"

namespace roadfield {

namespace {
using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, std::int32_t>;
}

State State::zero(const Grid& g) {
  State s;
  s.u = Eigen::VectorXd::Zero(g.nx);
  s.v = Eigen::VectorXd::Zero(static_cast<long>(g.nx) * g.ny);
  s.grid = g;
  return s;
}

State State::constant(const Grid& g, double road_level, double field_level) {
  State s;
  s.u = Eigen::VectorXd::Constant(g.nx, road_level);
  s.v = Eigen::VectorXd::Constant(static_cast<long>(g.nx) * g.ny, field_level);
  s.grid = g;
  return s;
}

double State::sup() const {
  double m = 0.0;
  if (u.size() > 0) m = std::max(m, u.maxCoeff());
  if (v.size() > 0) m = std::max(m, v.maxCoeff());
  return m;
}

double State::min() const {
  double m = std::numeric_limits<double>::infinity();
  if (u.size() > 0) m = std::min(m, u.minCoeff());
  if (v.size() > 0) m = std::min(m, v.minCoeff());
  return std::isfinite(m) ? m : 0.0;
}

struct Stepper::Factorization {
  SpMat mat;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<std::int32_t>> lu;
};

Stepper::Stepper(const SparseOperator& op, double dt) : op_(op), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("time step must be positive and finite");
  saturation_ = ReactionTerm{op_.profile}.saturation();
  sup_m_ = op_.profile.sup();

  const CsrMatrix& a = op_.matrix;
  std::vector<Eigen::Triplet<double, std::int32_t>> trips;
  trips.reserve(a.nnz());
  for (std::int32_t r = 0; r < a.n; ++r)
    for (std::int32_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      trips.emplace_back(r, a.col[k],
                         dt * a.val[k] + (a.col[k] == r ? 1.0 : 0.0));
  fact_ = std::make_unique<Factorization>();
  fact_->mat.resize(a.n, a.n);
  fact_->mat.setFromTriplets(trips.begin(), trips.end());
  fact_->mat.makeCompressed();
  fact_->lu.compute(fact_->mat);
  if (fact_->lu.info() != Eigen::Success)
    throw NumericsError("factorization of I + dt A failed");
  rhs_.resize(a.n);
}

Stepper::~Stepper() = default;

double Stepper::admissible_dt(double field_sup) const {
  // [sup m]+ keeps the bound meaningful for everywhere-hostile profiles --
  // the explicit map v - dt v^2 must stay monotone regardless of m's sign.
  const double load = std::max(sup_m_, 0.0) + 2.0 * std::max(field_sup, 0.0);
  if (load <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 / load;
}

void Stepper::require_admissible(double field_sup) const {
  const double cap = admissible_dt(field_sup);
  if (dt_ > cap)
    throw ConfigError("time step " + fmt17(dt_) +
                      " exceeds the admissible bound " + fmt17(cap) +
                      " = 1 / (2 ([sup m]+ + 2 sup v)); the explicit "
                      "reaction map would lose monotonicity");
}

void Stepper::step(Eigen::VectorXd& w) const {
  if (w.size() != op_.dim())
    throw ConfigError("state size does not match the operator");
  const int nroad = op_.index().n_road;
  rhs_.head(nroad) = w.head(nroad);
  kernels::quadratic_sink(w.data() + nroad, dt_, rhs_.data() + nroad,
                          static_cast<std::size_t>(w.size() - nroad));
  w = fact_->lu.solve(rhs_);
}

namespace {

struct StepKey {
  const void* profile = nullptr;
  double D = 0.0, d = 0.0, mu = 0.0, nu = 0.0, c = 0.0;
  bool strict = true;
  double X = 0.0, Y = 0.0, h = 0.0;
  int nx = 0, ny = 0;
  double dt = 0.0;
  bool operator==(const StepKey&) const = default;
};

// Small per-thread LRU of factored steppers; the Stepper's operator keeps
// the profile state alive, so the identity pointer stays unambiguous.
std::shared_ptr<const Stepper> cached_stepper(const Grid& g,
                                              const Parameters& p,
                                              const NicheProfile& profile,
                                              double dt) {
  struct Entry {
    StepKey key;
    std::shared_ptr<const Stepper> stepper;
  };
  thread_local std::vector<Entry> cache;
  const StepKey key{profile.identity(), p.D,       p.d,  p.mu, p.nu,
                    p.c,                p.strict_exchange,
                    g.half_width,       g.height,  g.spacing,
                    g.nx,               g.ny,      dt};
  for (std::size_t i = 0; i < cache.size(); ++i)
    if (cache[i].key == key) {
      std::rotate(cache.begin(), cache.begin() + i, cache.begin() + i + 1);
      return cache.front().stepper;
    }
  auto st = std::make_shared<const Stepper>(assemble_coupled(g, p, profile), dt);
  cache.insert(cache.begin(), Entry{key, st});
  if (cache.size() > 4) cache.pop_back();
  return st;
}

void check_state_shape(const State& s, const char* who) {
  if (s.u.size() != s.grid.nx ||
      s.v.size() != static_cast<long>(s.grid.nx) * s.grid.ny)
    throw ConfigError(std::string(who) +
                      ": state component sizes do not match its grid");
}

bool same_grid(const Grid& a, const Grid& b) {
  return a.nx == b.nx && a.ny == b.ny && a.half_width == b.half_width &&
         a.height == b.height && a.spacing == b.spacing;
}

Eigen::VectorXd pack(const State& s) {
  Eigen::VectorXd w(s.u.size() + s.v.size());
  w.head(s.u.size()) = s.u;
  w.tail(s.v.size()) = s.v;
  return w;
}

State unpack(double t, const Eigen::VectorXd& w, const Grid& g) {
  State s;
  s.t = t;
  s.u = w.head(g.nx);
  s.v = w.tail(static_cast<long>(g.nx) * g.ny);
  s.grid = g;
  return s;
}

}  // namespace

State step(const State& state, const Parameters& p, const ReactionTerm& term,
           double dt) {
  p.validate();
  check_state_shape(state, "step");
  const double vsup = state.v.size() > 0 ? state.v.maxCoeff() : 0.0;
  const auto st = cached_stepper(state.grid, p, term.profile, dt);
  st->require_admissible(vsup);
  Eigen::VectorXd w = pack(state);
  st->step(w);
  return unpack(state.t + dt, w, state.grid);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Persistence:
      return "persistence";
    case Verdict::Extinction:
      return "extinction";
    case Verdict::Undetermined:
      return "undetermined";
  }
  return "unknown";
}

Classification evolve_classify(const Parameters& p, const ReactionTerm& term,
                               const Grid& grid, double horizon, double dt,
                               double steady_tol, const EvolveOptions& extra) {
  p.validate();
  if (!(horizon > 0.0) || !(steady_tol > 0.0) || extra.check_every < 1)
    throw ConfigError("invalid classification options");
  if (!(p.mu > 0.0))
    throw ConfigError(
        "classification of the coupled system requires mu > 0 (the "
        "supersolution road level is nu S / mu)");

  const SparseOperator op = assemble_coupled(grid, p, term.profile);
  SolverOptions eopts;
  eopts.tol = extra.eigen_tol;
  const EigenResult eig = principal_eigenpair(op, eopts);

  Classification out;
  out.lambda = eig.lambda;
  const double S = term.saturation();
  out.sup_state = S;
  if (std::abs(eig.lambda) < extra.lambda_margin) {
    out.verdict = Verdict::Undetermined;  // within discretization noise of 0
    return out;
  }

  const Stepper st(op, dt);
  st.require_admissible(S);
  const StackedIndex idx = op.index();
  const int n = idx.size();

  Eigen::VectorXd upper(n);
  const double road_cap = p.nu * S / p.mu;
  for (int i = 0; i < idx.n_road; ++i) upper[idx.road(i)] = road_cap;
  for (int j = 0; j < idx.ny; ++j)
    for (int i = 0; i < idx.nx; ++i) upper[idx.field(i, j)] = S;

  const bool track_lower = eig.lambda < 0.0;
  Eigen::VectorXd lower;
  if (track_lower) {
    // eps <= -lambda keeps eps * (principal eigenvector) a subsolution;
    // shrink further if needed so the road part starts below the
    // supersolution level.
    double eps = 0.5 * std::min(-eig.lambda, 1.0);
    const double road_max = eig.vector.head(idx.n_road).maxCoeff();
    if (eps * road_max > 0.99 * road_cap) eps = 0.99 * road_cap / road_max;
    lower = eps * eig.vector;
  }

  // Squeeze witnesses: the favorable set {m > 0} (or the most favorable cell
  // when none is) is where a persistent state must stay bounded away from 0.
  std::vector<int> core;
  {
    int best = idx.field(0, 0);
    double best_m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < idx.ny; ++j)
      for (int i = 0; i < idx.nx; ++i) {
        const double m = term.profile(grid.x(i), grid.y(j));
        if (m > 0.0) core.push_back(idx.field(i, j));
        if (m > best_m) {
          best_m = m;
          best = idx.field(i, j);
        }
      }
    if (core.empty()) core.push_back(best);
  }
  const auto core_min_of = [&](const Eigen::VectorXd& w) {
    double m = std::numeric_limits<double>::infinity();
    for (int i : core) m = std::min(m, w[i]);
    return m;
  };

  out.state_min = upper.minCoeff();
  if (track_lower) out.state_min = std::min(out.state_min, lower.minCoeff());

  double rel_gap = std::numeric_limits<double>::infinity();
  double sup_u = S;
  const auto record = [&](double t) {
    sup_u = upper.maxCoeff();
    out.state_min = std::min(out.state_min, upper.minCoeff());
    out.core_min = core_min_of(track_lower ? lower : upper);
    if (track_lower) {
      out.state_min = std::min(out.state_min, lower.minCoeff());
      const double gap = (upper - lower).maxCoeff();
      rel_gap = gap / std::max(sup_u, std::numeric_limits<double>::min());
      out.evidence.push_back({t, sup_u, out.core_min, rel_gap});
      if ((lower - upper).maxCoeff() > 1e-10 * S)
        throw NumericsError(
            "bracket ordering violated during the squeeze evolution");
    } else {
      out.evidence.push_back({t, sup_u, out.core_min, sup_u / S});
    }
    if (extra.sink) {
      const State us = unpack(t, upper, grid);
      if (track_lower) {
        const State ls = unpack(t, lower, grid);
        extra.sink(us, &ls);
      } else {
        extra.sink(us, nullptr);
      }
    }
  };

  record(0.0);
  const int total = static_cast<int>(std::ceil(horizon / dt));
  int k = 0;
  for (k = 1; k <= total; ++k) {
    st.step(upper);
    if (track_lower) st.step(lower);
    if (k % extra.check_every != 0 && k != total) continue;
    const double t = k * dt;
    record(t);
    if (track_lower) {
      if (rel_gap <= steady_tol) {
        if (!(out.core_min > 0.0))
          throw NumericsError(
              "bracket squeeze closed on a state vanishing on the favorable "
              "set");
        out.verdict = Verdict::Persistence;
        out.steady_state = unpack(t, upper, grid);
        break;
      }
    } else if (sup_u < steady_tol * S) {
      out.verdict = Verdict::Extinction;
      break;
    }
  }
  k = std::min(k, total);
  out.steps = k;
  out.time = k * dt;
  out.sup_state = sup_u;
  out.bracket_gap = track_lower ? rel_gap : 0.0;
  return out;
}

ComparisonReport check_comparison(const Parameters& p, const ReactionTerm& term,
                                  const Grid& grid, const State& init_low,
                                  const State& init_high, double horizon,
                                  double dt) {
  p.validate();
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  check_state_shape(init_low, "check_comparison");
  check_state_shape(init_high, "check_comparison");
  if (!same_grid(init_low.grid, grid) || !same_grid(init_high.grid, grid))
    throw ConfigError("check_comparison: states live on a different grid");
  if ((init_low.u - init_high.u).maxCoeff() > 0.0 ||
      (init_low.v - init_high.v).maxCoeff() > 0.0)
    throw ConfigError("check_comparison requires init_low <= init_high");

  const Stepper st(assemble_coupled(grid, p, term.profile), dt);
  st.require_admissible(std::max(st.saturation(), init_high.sup()));
  Eigen::VectorXd lower = pack(init_low);
  Eigen::VectorXd upper = pack(init_high);
  ComparisonReport rep;
  rep.steps = static_cast<int>(std::ceil(horizon / dt));
  for (int k = 0; k < rep.steps; ++k) {
    st.step(lower);
    st.step(upper);
    rep.max_violation =
        std::max(rep.max_violation, (lower - upper).maxCoeff());
  }
  rep.max_violation = std::max(rep.max_violation, 0.0);
  return rep;
}

UniquenessReport check_uniqueness(const Parameters& p, const ReactionTerm& term,
                                  const Grid& grid, double horizon, double dt,
                                  double tol) {
  p.validate();
  if (!(horizon > 0.0) || !(tol > 0.0))
    throw ConfigError("horizon and tol must be positive");
  const Stepper st(assemble_coupled(grid, p, term.profile), dt);
  st.require_admissible(st.saturation());
  const double amp = 0.5 * st.saturation();
  const StackedIndex idx = st.op().index();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(idx.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(idx.size());
  for (int j = 0; j < idx.ny; ++j)
    for (int i = 0; i < idx.nx; ++i) {
      const double x = grid.x(i);
      const double dy = (grid.y(j) - 1.0) * (grid.y(j) - 1.0);
      a[idx.field(i, j)] = amp * std::exp(-((x - 2.0) * (x - 2.0) + dy));
      b[idx.field(i, j)] = amp * std::exp(-((x + 2.0) * (x + 2.0) + dy));
    }

  UniquenessReport rep;
  const auto gap = [&] { return (a - b).cwiseAbs().maxCoeff(); };
  rep.gaps.push_back({0.0, gap()});
  const int total = static_cast<int>(std::ceil(horizon / dt));
  for (int k = 1; k <= total; ++k) {
    st.step(a);
    st.step(b);
    if (k % 10 == 0 || k == total) rep.gaps.push_back({k * dt, gap()});
  }
  rep.final_gap = rep.gaps.back()[1];
  rep.contracting = true;
  for (std::size_t k = rep.gaps.size() / 2; k + 1 < rep.gaps.size(); ++k)
    if (rep.gaps[k + 1][1] > rep.gaps[k][1] + 1e-12) rep.contracting = false;
  rep.within_tol = rep.final_gap <= tol;
  return rep;
}

}  // namespace roadfield
