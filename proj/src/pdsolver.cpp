#include "pdcontact/pdsolver.hpp"

#include <algorithm>
#include <cmath>

#include "pdcontact/cones.hpp"
#include "pdcontact/residuals.hpp"

namespace pdcontact::solver {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_cap: return "iteration_cap";
    case SolveStatus::nan_abort: return "nan_abort";
  }
  return "?";
}

void validate(const SolverConfig& cfg) {
  if (!(cfg.alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (cfg.max_outer == 0) throw std::invalid_argument("max_outer must be positive");
  if (!(cfg.pcg_tol > 0.0)) throw std::invalid_argument("pcg_tol must be positive");
  if (cfg.pcg_maxit == 0) throw std::invalid_argument("pcg_maxit must be positive");
  if (!(cfg.theta_fixed >= 0.0 && cfg.theta_fixed <= 1.0)) {
    throw std::invalid_argument("theta_fixed must lie in [0, 1]");
  }
  if (!(cfg.spectral_tol > 0.0)) throw std::invalid_argument("spectral_tol must be positive");
  if (cfg.spectral_maxit == 0) throw std::invalid_argument("spectral_maxit must be positive");
}

SpectralEstimates estimate_spectrum(const ProblemInstance& problem, const SolverConfig& cfg) {
  SpectralEstimates est;
  const SparseMatrix t = assemble_contact_operator(problem.contact);
  est.sigma_T = (t.nnz() == 0) ? 1.0 : max_singular_value(t, cfg.spectral_tol, cfg.spectral_maxit);
  try {
    est.mu_pi = std::max(0.0, min_eigenvalue(problem.K, cfg.spectral_tol, cfg.spectral_maxit));
  } catch (const ConvergenceError&) {
    est.mu_pi = 0.0;
  } catch (const BreakdownError&) {
    est.mu_pi = 0.0;
  }
  return est;
}

namespace {

// (beta K + I) x = b with Jacobi preconditioning.
class ShiftedStiffness {
 public:
  explicit ShiftedStiffness(const SparseMatrix& k) : k_(k), diag_(k.diagonal_entries()), inv_diag_(k.rows()) {}

  PcgResult solve(double beta, std::span<const double> b, std::span<const double> x0,
                  const SolverConfig& cfg) {
    for (std::size_t i = 0; i < diag_.size(); ++i) inv_diag_[i] = 1.0 / (beta * diag_[i] + 1.0);
    const LinearOperator op = [this, beta](std::span<const double> x, std::span<double> y) {
      spmv(k_, x, y);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = beta * y[i] + x[i];
    };
    return pcg(op, b, x0, inv_diag_, PcgOptions{cfg.pcg_tol, cfg.pcg_maxit, false});
  }

 private:
  const SparseMatrix& k_;
  Vector diag_;
  Vector inv_diag_;
};

// Step-size schedule and friction-bound policy distinguish the two variants.
struct Schedule {
  bool accelerated = false;
  double alpha = 0.0;
  double beta = 0.0;
  double theta = 1.0;  // fixed variant only
  double mu_pi = 0.0;
};

Solution run_primal_dual(const ProblemInstance& problem, std::span<const double> frozen_bound,
                         Schedule sched, const SolverConfig& cfg, const WarmStart& start) {
  validate(problem);
  validate(cfg);
  const auto& ct = problem.contact;
  const std::size_t d = problem.dofs();
  const std::size_t m = static_cast<std::size_t>(ct.m);
  const std::size_t b = ct.block_size();
  const std::size_t nr = b * ct.c;

  const SparseMatrix t = assemble_contact_operator(ct);
  const SparseMatrix t_rows = t.transpose();  // row j-block gives (tn_j, Tt_j)^T

  Solution sol;
  sol.du = start.du.empty() ? Vector(d, 0.0) : start.du;
  sol.r = start.r.empty() ? Vector(nr, 0.0) : start.r;
  require_size(sol.du.size(), d, "initial displacement increment");
  require_size(sol.r.size(), nr, "initial reactions");
  sol.g_tilde = sched.accelerated ? Vector(ct.c, 0.0) : Vector(frozen_bound.begin(), frozen_bound.end());

  ShiftedStiffness system(problem.K);
  Vector du_hat = sol.du;
  Vector tu(nr), tu_hat(nr), tr(d), rhs(d);
  double alpha = sched.alpha;
  double beta = sched.beta;

  sol.status = SolveStatus::iteration_cap;
  for (std::size_t k = 0; k < cfg.max_outer; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.alpha = alpha;
    rec.beta = beta;

    spmv(t_rows, du_hat, tu_hat);
    if (sched.accelerated) {
      spmv(t_rows, sol.du, tu);
      for (std::size_t j = 0; j < ct.c; ++j) {
        sol.g_tilde[j] = ct.g[j] + problem.mu * tangential_norm(std::span<const double>(tu.data() + b * j + 1, m));
      }
    }

    // Dual ascent and nodewise projection onto the friction cone.
    for (std::size_t j = 0; j < ct.c; ++j) {
      double* blk = sol.r.data() + b * j;
      blk[0] += alpha * (sol.g_tilde[j] - tu_hat[b * j]);
      for (std::size_t a = 1; a < b; ++a) blk[a] -= alpha * tu_hat[b * j + a];
      const std::span<double> block(blk, b);
      project_friction_cone_inplace(block, problem.mu);
      rec.dual_in_cone = rec.dual_in_cone && in_friction_cone(std::span<const double>(block), problem.mu, 0.0);
    }

    // Primal proximal step.
    spmv(t, sol.r, tr);
    for (std::size_t i = 0; i < d; ++i) rhs[i] = sol.du[i] + beta * (tr[i] + problem.p[i]);
    PcgResult solve = system.solve(beta, rhs, sol.du, cfg);
    rec.pcg_iters = solve.iterations;
    rec.pcg_converged = solve.converged;
    if (!solve.converged) ++sol.pcg_failures;

    double theta = sched.theta;
    if (sched.accelerated) {
      theta = 1.0 / std::sqrt(1.0 + sched.mu_pi * beta);
      alpha /= theta;
      beta *= theta;
    }
    rec.theta = theta;

    double step_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = solve.x[i] - sol.du[i];
      step_sq += diff * diff;
      du_hat[i] = solve.x[i] + theta * diff;
    }
    sol.du = std::move(solve.x);
    rec.step_norm = std::sqrt(step_sq);
    sol.iterations = k + 1;

    if (!std::isfinite(rec.step_norm) || !all_finite(sol.r)) {
      sol.history.push_back(rec);
      sol.status = SolveStatus::nan_abort;
      sol.message = "non-finite iterate at iteration " + std::to_string(k);
      break;
    }
    if (cfg.diagnostics) {
      const auto rep = verify::residual_report(problem, sol.du, sol.r);
      rec.resid_eq = rep.resid_eq;
      rec.resid_compl = rep.resid_compl;
      rec.resid_pen = rep.resid_pen;
    }
    sol.history.push_back(rec);
    if (rec.step_norm <= cfg.eps) {
      sol.status = SolveStatus::converged;
      break;
    }
  }
  sol.converged = sol.status == SolveStatus::converged;
  if (sol.status == SolveStatus::iteration_cap) {
    sol.message = "stopped after " + std::to_string(cfg.max_outer) + " iterations";
  }
  return sol;
}

}  // namespace

Vector prox_pi(std::span<const double> u, double beta, const SparseMatrix& k,
               std::span<const double> p, std::span<const double> warm_start,
               const SolverConfig& cfg, ProxInfo* info) {
  if (!(beta > 0.0)) throw std::invalid_argument("prox_pi: beta must be positive");
  require_size(u.size(), k.rows(), "prox_pi argument");
  require_size(p.size(), k.rows(), "prox_pi load");
  Vector rhs(u.begin(), u.end());
  axpy(beta, p, rhs);
  ShiftedStiffness system(k);
  PcgResult res = system.solve(beta, rhs, warm_start.empty() ? std::span<const double>(u) : warm_start, cfg);
  if (info) *info = ProxInfo{res.iterations, res.converged};
  return std::move(res.x);
}

Solution pd_fixed_step(const ProblemInstance& problem, std::span<const double> g_tilde,
                       double alpha, double beta, double theta, const SolverConfig& cfg,
                       const WarmStart& start) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("step sizes must be positive");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
  require_size(g_tilde.size(), problem.contact.c, "fixed friction bound");
  Schedule sched;
  sched.alpha = alpha;
  sched.beta = beta;
  sched.theta = theta;
  return run_primal_dual(problem, g_tilde, sched, cfg, start);
}

Solution pd_accelerated(const ProblemInstance& problem, const SolverConfig& cfg,
                        const std::optional<SpectralEstimates>& spectral, const WarmStart& start) {
  validate(cfg);
  const SpectralEstimates est = spectral ? *spectral : estimate_spectrum(problem, cfg);
  if (!(est.sigma_T > 0.0)) throw std::invalid_argument("sigma_T must be positive");
  Schedule sched;
  sched.accelerated = true;
  sched.alpha = cfg.alpha0;
  sched.beta = 1.0 / (cfg.alpha0 * est.sigma_T * est.sigma_T);
  sched.mu_pi = est.mu_pi;
  Solution sol = run_primal_dual(problem, {}, sched, cfg, start);
  sol.spectral = est;
  return sol;
}

ProblemInstance incremental_problem(const ProblemInstance& base, const LoadStep& step) {
  require_size(step.u_prev.size(), base.dofs(), "previous displacement");
  require_size(step.p_next.size(), base.dofs(), "next load");
  ProblemInstance inc = base;
  inc.p = step.p_next;
  axpy(-1.0, spmv(base.K, step.u_prev), inc.p);
  const Vector un = spmv_transpose(base.contact.Tn, step.u_prev);
  for (std::size_t j = 0; j < inc.contact.c; ++j) {
    inc.contact.g[j] = std::max(0.0, base.contact.g[j] - un[j]);
  }
  return inc;
}

std::vector<LoadStepResult> load_step_driver(const ProblemInstance& base,
                                             std::span<const Vector> loads,
                                             std::span<const double> u0, const SolverConfig& cfg) {
  if (loads.empty()) throw std::invalid_argument("load_step_driver: no load steps");
  const std::size_t d = base.dofs();
  Vector u = u0.empty() ? Vector(d, 0.0) : Vector(u0.begin(), u0.end());
  require_size(u.size(), d, "initial displacement");

  const SpectralEstimates est = estimate_spectrum(base, cfg);
  std::vector<LoadStepResult> results;
  Vector r_prev;
  for (std::size_t l = 0; l < loads.size(); ++l) {
    const ProblemInstance inc = incremental_problem(base, LoadStep{u, loads[l]});
    Solution sol = pd_accelerated(inc, cfg, est, WarmStart{{}, r_prev});
    if (!sol.converged) {
      const std::string why = std::string(to_string(sol.status)) +
                              (sol.message.empty() ? "" : " (" + sol.message + ")");
      throw LoadStepError(l, why, std::move(results));
    }
    axpy(1.0, sol.du, u);
    r_prev = sol.r;
    results.push_back(LoadStepResult{u, sol.du, sol.r, std::move(sol)});
  }
  return results;
}

}  // namespace pdcontact::solver
