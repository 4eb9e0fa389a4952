#include "roadfield/eigensolver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "roadfield/kernels.hpp"
#include "roadfield/util.hpp"

namespace roadfield {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, std::int32_t>;

std::vector<double> stacked_x(const SparseOperator& op) {
  const StackedIndex idx = op.index();
  std::vector<double> xs(static_cast<std::size_t>(idx.size()));
  for (int i = 0; i < idx.n_road; ++i) xs[idx.road(i)] = op.grid.x(i);
  for (int j = 0; j < idx.ny; ++j)
    for (int i = 0; i < idx.nx; ++i) xs[idx.field(i, j)] = op.grid.x(i);
  return xs;
}

// Exact similarity E A E^{-1}: entry (r, c) scales by e^{alpha (x_r - x_c)}.
CsrMatrix balance_gauge(const CsrMatrix& a, const std::vector<double>& xs,
                        double alpha) {
  CsrMatrix b = a;
  for (std::int32_t r = 0; r < b.n; ++r)
    for (std::int32_t k = b.row_ptr[r]; k < b.row_ptr[r + 1]; ++k)
      b.val[k] *= std::exp(alpha * (xs[r] - xs[b.col[k]]));
  return b;
}

double rq(const CsrMatrix& a, const Eigen::VectorXd& w, Eigen::VectorXd& tmp) {
  const auto n = static_cast<std::size_t>(w.size());
  a.matvec(w.data(), tmp.data());
  return kernels::dot(w.data(), tmp.data(), n) /
         kernels::dot(w.data(), w.data(), n);
}

double resid(const CsrMatrix& a, const Eigen::VectorXd& w, double rho,
             Eigen::VectorXd& tmp) {
  const auto n = static_cast<std::size_t>(w.size());
  a.matvec(w.data(), tmp.data());
  kernels::axpy(-rho, w.data(), tmp.data(), n);
  return kernels::inf_norm(tmp.data(), n) / kernels::inf_norm(w.data(), n);
}

double max_abs_row_sum(const CsrMatrix& a) {
  double s = 0.0;
  for (std::int32_t r = 0; r < a.n; ++r) {
    double row = 0.0;
    for (std::int32_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      row += std::abs(a.val[k]);
    s = std::max(s, row);
  }
  return s;
}

double min_diagonal(const CsrMatrix& a) {
  double m = std::numeric_limits<double>::infinity();
  for (std::int32_t r = 0; r < a.n; ++r)
    for (std::int32_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      if (a.col[k] == r) m = std::min(m, a.val[k]);
  return m;
}

// w <- (s I - A) w / ||.||_inf : one nonnegative power-smoothing step.
void power_step(const CsrMatrix& a, double s, Eigen::VectorXd& w,
                Eigen::VectorXd& tmp) {
  const auto n = static_cast<std::size_t>(w.size());
  a.matvec(w.data(), tmp.data());
  kernels::scale(s, w.data(), n);
  kernels::axpy(-1.0, tmp.data(), w.data(), n);
  const double mx = kernels::inf_norm(w.data(), n);
  if (!(mx > 0.0) || !std::isfinite(mx))
    throw NumericsError("power smoothing produced a zero or non-finite state");
  kernels::scale(1.0 / mx, w.data(), n);
}

}  // namespace

double balancing_rate(const SparseOperator& op) {
  const double c = op.params.c;
  if (c == 0.0) return 0.0;
  const double d = op.params.d;
  if (op.kind == OperatorKind::Coupled) {
    const double D = op.params.D;
    return c * (d + D) / (4.0 * d * D);
  }
  return c / (2.0 * d);
}

EigenResult principal_eigenpair(const SparseOperator& op,
                                const SolverOptions& opts) {
  const int n = op.dim();
  const std::vector<double> xs = stacked_x(op);
  const double alpha = opts.balance ? balancing_rate(op) : 0.0;
  const CsrMatrix a =
      alpha != 0.0 ? balance_gauge(op.matrix, xs, alpha) : op.matrix;

  const double s = 1.0 + max_abs_row_sum(a);
  // Field diagonals equal (nonnegative flux coefficients) - m, so
  // -min(diag) >= sup_grid m and sigma_safe = -([sup m]+ + 1) < lambda_1.
  const double sup_m_ub = std::max(0.0, -min_diagonal(a));
  const double sigma_safe = -(sup_m_ub + 1.0);

  SpMat base(n, n);
  {
    std::vector<Eigen::Triplet<double, std::int32_t>> trips;
    trips.reserve(a.nnz());
    for (std::int32_t r = 0; r < a.n; ++r)
      for (std::int32_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
        trips.emplace_back(r, a.col[k], a.val[k]);
    base.setFromTriplets(trips.begin(), trips.end());
    base.makeCompressed();
  }
  std::vector<std::int32_t> diag_pos(static_cast<std::size_t>(n), -1);
  for (std::int32_t j = 0; j < n; ++j)
    for (std::int32_t k = base.outerIndexPtr()[j];
         k < base.outerIndexPtr()[j + 1]; ++k)
      if (base.innerIndexPtr()[k] == j) diag_pos[static_cast<std::size_t>(j)] = k;
  for (std::int32_t j = 0; j < n; ++j)
    if (diag_pos[static_cast<std::size_t>(j)] < 0)
      throw NumericsError("operator is missing a diagonal entry");

  SpMat shifted = base;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<std::int32_t>> lu;
  lu.analyzePattern(shifted);

  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd tmp(n);
  for (int k = 0; k < opts.smoothing_steps; ++k) power_step(a, s, w, tmp);

  // Inverse iteration with shifts kept below the current estimate: any
  // eigenvalue z other than lambda_1 has |z - sigma| >= Re z - sigma >
  // lambda_1 - sigma, so the factored solves amplify only the principal
  // mode, and sigma = rho - 2 res approaches lambda_1 from below.
  double sigma = sigma_safe;
  double rho = rq(a, w, tmp);
  double res = resid(a, w, rho, tmp);
  int solves = 0;
  bool converged = false;
  for (int outer = 0;
       outer < opts.max_outer && solves < opts.max_solves && !converged;
       ++outer) {
    std::copy(base.valuePtr(), base.valuePtr() + base.nonZeros(),
              shifted.valuePtr());
    for (std::int32_t j = 0; j < n; ++j)
      shifted.valuePtr()[diag_pos[static_cast<std::size_t>(j)]] -= sigma;
    lu.factorize(shifted);
    if (lu.info() != Eigen::Success) {
      sigma -= 1e-8 * std::max(1.0, std::abs(sigma));
      continue;
    }
    for (int inner = 0; inner < opts.max_inner && solves < opts.max_solves;
         ++inner) {
      tmp = lu.solve(w);
      ++solves;
      const double mx = kernels::inf_norm(tmp.data(), static_cast<std::size_t>(n));
      if (!(mx > 0.0) || !std::isfinite(mx)) {
        sigma -= 1e-8 * std::max(1.0, std::abs(sigma));
        break;
      }
      w = tmp / mx;
      rho = rq(a, w, tmp);
      const double res_new = resid(a, w, rho, tmp);
      if (res_new <= opts.tol) {
        res = res_new;
        converged = true;
        break;
      }
      if (res_new > 0.5 * res && inner >= 2) {
        res = res_new;
        break;  // contraction stalled: refactor closer to the eigenvalue
      }
      res = res_new;
    }
    if (!converged) sigma = rho - 2.0 * res;
  }
  if (!converged)
    throw NumericsError("principal eigenpair did not converge (residual " +
                        fmt17(res) + ")");

  // Certify the Perron mode: after normalizing by the largest entry the
  // vector must be nonnegative up to roundoff.
  int kmax = 0;
  w.cwiseAbs().maxCoeff(&kmax);
  w /= w[kmax];
  const double neg = std::max(0.0, -w.minCoeff());
  if (neg > 1e-9)
    throw NumericsError(
        "eigensolver converged to a sign-changing (non-principal) mode "
        "(negative fraction " +
        fmt17(neg) + ")");

  // Far-field entries of the true eigenvector sit below the noise floor of
  // the factored solves, so their computed signs are roundoff garbage.
  // Clamp to the nonnegative cone and reapply sI - A (entrywise >= 0,
  // irreducible): nonnegative arithmetic cannot cancel and the support grows
  // one graph neighborhood per step, so the iterate turns strictly positive
  // after at most diameter steps; these are power steps toward the Perron
  // vector, so the eigenpair is not degraded.
  w = w.cwiseMax(0.0);
  for (int step = 0; step < n + 8 && !(w.minCoeff() > 0.0); ++step)
    power_step(a, s, w, tmp);
  if (!(w.minCoeff() > 0.0))
    throw NumericsError("eigenvector positivity could not be certified (min " +
                        fmt17(w.minCoeff()) + ")");

  if (alpha != 0.0) {
    for (int i = 0; i < n; ++i)
      w[i] *= std::exp(-alpha * xs[static_cast<std::size_t>(i)]);
    const double mx = kernels::inf_norm(w.data(), static_cast<std::size_t>(n));
    if (!std::isfinite(mx))
      throw NumericsError("gauge back-transform overflowed");
    w /= mx;
    if (!(w.minCoeff() > 0.0))
      throw NumericsError("positivity lost in gauge back-transform");
  }

  EigenResult out;
  out.lambda = rho;
  out.vector = w;
  out.residual = resid(op.matrix, w, rho, tmp);  // certified in plain form
  out.iterations = solves;
  out.alpha = alpha;
  return out;
}

EigenResult dense_oracle(const SparseOperator& op) {
  const int n = op.dim();
  if (n > 2000)
    throw ConfigError("dense oracle limited to 2000 unknowns, got " +
                      std::to_string(n));
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  const CsrMatrix& a = op.matrix;
  for (std::int32_t r = 0; r < a.n; ++r)
    for (std::int32_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      dense(r, a.col[k]) = a.val[k];

  Eigen::EigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success)
    throw NumericsError("dense eigensolver failed to converge");
  const auto& evals = es.eigenvalues();
  int k1 = 0;
  for (int k = 1; k < n; ++k)
    if (evals[k].real() < evals[k1].real()) k1 = k;
  const std::complex<double> lam = evals[k1];
  if (std::abs(lam.imag()) > 1e-9 * std::max(1.0, std::abs(lam.real())))
    throw NumericsError("principal eigenvalue is not real (imag " +
                        fmt17(lam.imag()) + ")");
  double sep = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
    if (k != k1) sep = std::min(sep, std::abs(evals[k] - lam));
  if (sep < 1e-9)
    throw NumericsError("principal eigenvalue is not simple (separation " +
                        fmt17(sep) + ")");

  Eigen::VectorXcd v = es.eigenvectors().col(k1);
  int kmax = 0;
  v.cwiseAbs().maxCoeff(&kmax);
  v /= v[kmax];
  if (v.imag().cwiseAbs().maxCoeff() > 1e-8)
    throw NumericsError("principal eigenvector has a non-real component");

  EigenResult out;
  out.lambda = lam.real();
  out.vector = v.real();
  Eigen::VectorXd tmp(n);
  out.residual = resid(a, out.vector, out.lambda, tmp);
  out.iterations = 0;
  out.alpha = 0.0;
  return out;
}

double rayleigh_quotient(const Grid& g, const Parameters& p,
                         const NicheProfile& profile,
                         const Eigen::VectorXd& phi,
                         const Eigen::VectorXd& psi) {
  if (p.c != 0.0)
    throw ConfigError(
        "rayleigh_quotient is a variational identity for c == 0 only");
  if (!(p.mu > 0.0) || !(p.nu > 0.0))
    throw ConfigError("rayleigh_quotient requires mu > 0 and nu > 0");
  const int nx = g.nx;
  const int ny = g.ny;
  if (phi.size() != nx || psi.size() != static_cast<long>(nx) * ny)
    throw ConfigError("rayleigh_quotient: phi/psi sizes do not match the grid");
  const double h = g.spacing;
  const double ih2 = 1.0 / (h * h);
  const double mu = p.mu;
  const double nu = p.nu;
  const auto f = [nx](int i, int j) { return j * nx + i; };

  // 1d Dirichlet energy of the road: interior face jumps + half-cell ends.
  double e1 = 0.0;
  for (int i = 0; i + 1 < nx; ++i) {
    const double jmp = phi[i + 1] - phi[i];
    e1 += jmp * jmp * ih2;
  }
  e1 += 2.0 * ih2 * (phi[0] * phi[0] + phi[nx - 1] * phi[nx - 1]);

  // 2d Dirichlet energy of the field: x and y face jumps, half-cell terms on
  // the three Dirichlet sides, nothing on the road side.
  double e2 = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double jmp = psi[f(i + 1, j)] - psi[f(i, j)];
      e2 += jmp * jmp * ih2;
    }
    const double l = psi[f(0, j)];
    const double r = psi[f(nx - 1, j)];
    e2 += 2.0 * ih2 * (l * l + r * r);
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j + 1 < ny; ++j) {
      const double jmp = psi[f(i, j + 1)] - psi[f(i, j)];
      e2 += jmp * jmp * ih2;
    }
    const double t = psi[f(i, ny - 1)];
    e2 += 2.0 * ih2 * t * t;
  }

  double growth = 0.0;  // sum m psi^2
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double v = psi[f(i, j)];
      growth += profile(g.x(i), g.y(j)) * v * v;
    }

  double exch = 0.0;  // sum (mu phi - nu psi|y=0)^2
  for (int i = 0; i < nx; ++i) {
    const double gap = mu * phi[i] - nu * psi[f(i, 0)];
    exch += gap * gap;
  }

  const double q =
      mu * h * p.D * e1 + nu * h * h * (p.d * e2 - growth) + h * exch;
  const double norm =
      mu * h * phi.squaredNorm() + nu * h * h * psi.squaredNorm();
  if (!(norm > 0.0))
    throw ConfigError("rayleigh_quotient of the zero state");
  return q / norm;
}

ExhaustionResult exhaust_lambda(
    const std::function<SparseOperator(const Grid&)>& assemble,
    const ExhaustionSchedule& schedule) {
  if (!(schedule.x0 > 0.0) || !(schedule.growth > 1.0) ||
      !(schedule.spacing > 0.0) || schedule.max_steps < 1)
    throw ConfigError("invalid exhaustion schedule");
  ExhaustionResult out;
  // a one-rung schedule pins the truncation by explicit request: there is no
  // ladder whose stabilization could be awaited, so the run counts as
  // converged once its single eigensolve succeeds
  out.converged = schedule.max_steps == 1;
  SolverOptions opts;
  opts.tol = schedule.eigen_tol;
  double xk = schedule.x0;
  for (int k = 0; k < schedule.max_steps; ++k) {
    double x = xk;
    if (schedule.max_x > 0.0) x = std::min(x, schedule.max_x);
    x = std::round(x / schedule.spacing) * schedule.spacing;
    const Grid grid = Grid::build(x, x, schedule.spacing);
    const EigenResult er = principal_eigenpair(assemble(grid), opts);
    out.ladder.push_back({x, x, er.lambda, er.residual, er.iterations});
    out.lambda_inf = er.lambda;
    const std::size_t m = out.ladder.size();
    if (m > 1 && std::abs(out.ladder[m - 1].lambda -
                          out.ladder[m - 2].lambda) <= schedule.stop_tol) {
      out.converged = true;
      break;
    }
    if (schedule.max_x > 0.0 && x >= schedule.max_x) break;
    xk *= schedule.growth;
  }
  return out;
}

ExhaustionResult exhaust_lambda(const Parameters& p,
                                const NicheProfile& profile, OperatorKind kind,
                                const ExhaustionSchedule& schedule) {
  const auto assemble = [&](const Grid& grid) {
    switch (kind) {
      case OperatorKind::Coupled:
        return assemble_coupled(grid, p, profile);
      case OperatorKind::Neumann:
        return assemble_neumann(grid, p.d, p.c, profile);
      case OperatorKind::Robin:
        return assemble_robin(grid, p.d, p.c, p.nu, profile);
    }
    throw ConfigError("unknown operator kind");
  };
  return exhaust_lambda(assemble, schedule);
}

}  // namespace roadfield
