#pragma once

#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdcontact/linalg.hpp"
#include "pdcontact/problem.hpp"

namespace pdcontact::solver {

struct SolverConfig {
  double alpha0 = 0.1;
  /// Stop once ||du^{k+1} - du^k|| <= eps.
  double eps = 1e-12;
  std::size_t max_outer = 100000;
  double pcg_tol = 1e-10;
  std::size_t pcg_maxit = 10000;
  /// Extrapolation weight of the non-accelerated (fixed-step) iteration.
  double theta_fixed = 1.0;
  /// Record the three contact residuals every iteration (one extra K du).
  bool diagnostics = false;
  double spectral_tol = 1e-8;
  std::size_t spectral_maxit = 1000000;
};

/// Throws std::invalid_argument on a non-positive or out-of-range field.
void validate(const SolverConfig& cfg);

struct IterationRecord {
  std::size_t k = 0;
  double step_norm = 0.0;
  double alpha = 0.0;  // dual step used in iteration k
  double beta = 0.0;   // primal step used in iteration k
  double theta = 0.0;  // extrapolation weight applied after iteration k
  std::size_t pcg_iters = 0;
  bool pcg_converged = true;
  /// Every reaction block of r^{k+1} satisfied the cone inequality exactly.
  bool dual_in_cone = true;
  // Filled only with SolverConfig::diagnostics; NaN otherwise.
  double resid_eq = std::numeric_limits<double>::quiet_NaN();
  double resid_compl = std::numeric_limits<double>::quiet_NaN();
  double resid_pen = std::numeric_limits<double>::quiet_NaN();
};

enum class SolveStatus { converged, iteration_cap, nan_abort };

const char* to_string(SolveStatus s);

struct Solution {
  Vector du;
  Vector r;  // node-major (r_n1, r_t1, ..., r_nc, r_tc)
  Vector g_tilde;
  std::size_t iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::iteration_cap;
  std::size_t pcg_failures = 0;
  SpectralEstimates spectral;
  std::string message;
  std::vector<IterationRecord> history;
};

/// Initial iterate; empty vectors mean zero.
struct WarmStart {
  Vector du;
  Vector r;
};

/// sigma_T of the stacked contact operator and mu_pi of K. A problem
/// without candidates reports sigma_T = 1; a singular K (no supports)
/// reports mu_pi = 0, which switches the acceleration off.
SpectralEstimates estimate_spectrum(const ProblemInstance& problem, const SolverConfig& cfg = {});

struct ProxInfo {
  std::size_t iterations = 0;
  bool converged = true;
};

/// prox of beta * (0.5 x^T K x - p^T x) at u:  (beta K + I)^{-1} (u + beta p),
/// solved by Jacobi-preconditioned CG started from `warm_start`.
Vector prox_pi(std::span<const double> u, double beta, const SparseMatrix& k,
               std::span<const double> p, std::span<const double> warm_start,
               const SolverConfig& cfg, ProxInfo* info = nullptr);

/// Non-accelerated primal-dual iteration for the subproblem with the friction
/// bound frozen at g_tilde. Convergence needs alpha * beta * sigma_T^2 <= 1.
Solution pd_fixed_step(const ProblemInstance& problem, std::span<const double> g_tilde,
                       double alpha, double beta, double theta, const SolverConfig& cfg,
                       const WarmStart& start = {});

/// Accelerated primal-dual iteration for the frictional contact problem:
/// beta_0 = 1 / (alpha_0 sigma_T^2), theta_k = 1 / sqrt(1 + mu_pi beta_k),
/// alpha_{k+1} = alpha_k / theta_k, beta_{k+1} = theta_k beta_k, and the
/// friction bound g~_j = g_j + mu ||Tt_j^T du^k|| refreshed every iteration.
Solution pd_accelerated(const ProblemInstance& problem, const SolverConfig& cfg,
                        const std::optional<SpectralEstimates>& spectral = std::nullopt,
                        const WarmStart& start = {});

/// State at t^l and the external load at t^{l+1}.
struct LoadStep {
  Vector u_prev;
  Vector p_next;
};

/// The incremental problem of one load step: p = p_next - K u_prev and the
/// gaps of `base` (measured in the undeformed configuration) reduced by
/// Tn^T u_prev, clipped at zero.
ProblemInstance incremental_problem(const ProblemInstance& base, const LoadStep& step);

struct LoadStepResult {
  Vector u;  // u^{l+1}
  Vector du;
  Vector r;  // total reaction at t^{l+1}
  Solution solution;
};

class LoadStepError : public std::runtime_error {
 public:
  LoadStepError(std::size_t step, const std::string& what, std::vector<LoadStepResult> done)
      : std::runtime_error("load step " + std::to_string(step) + ": " + what),
        step_(step),
        completed_(std::move(done)) {}
  std::size_t step() const { return step_; }
  const std::vector<LoadStepResult>& completed() const { return completed_; }

 private:
  std::size_t step_;
  std::vector<LoadStepResult> completed_;
};

/// Solves a sequence of load steps starting from displacement u0 (empty means
/// zero). `base` supplies K, the undeformed contact geometry and mu; its p is
/// ignored. Each step starts from the previous reactions and a zero
/// increment. Throws LoadStepError if a step does not converge.
std::vector<LoadStepResult> load_step_driver(const ProblemInstance& base,
                                             std::span<const Vector> loads,
                                             std::span<const double> u0, const SolverConfig& cfg);

}  // namespace pdcontact::solver
