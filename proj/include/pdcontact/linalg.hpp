#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>

#include "pdcontact/sparse_matrix.hpp"

namespace pdcontact {

/// Conjugate gradient hit a direction with non-positive curvature.
class BreakdownError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method exhausted its iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// y = A x for a symmetric positive definite operator.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct PcgOptions {
  double tol = 1e-10;
  std::size_t maxit = 10000;
  /// Keep every iterate (including x0) in PcgResult::iterates. Test hook.
  bool keep_iterates = false;
};

struct PcgResult {
  Vector x;
  std::size_t iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
  std::vector<Vector> iterates;
};

/// Jacobi-preconditioned conjugate gradient.
///
/// Stops once ||b - A x|| <= tol ||b||; the warm start is accepted without a
/// single iteration when it already meets that bound. Running out of
/// iterations is reported through `converged`, a zero-curvature direction
/// throws BreakdownError.
PcgResult pcg(const LinearOperator& a, std::span<const double> b,
              std::span<const double> x0, std::span<const double> inv_diag,
              const PcgOptions& options = {});

/// Convenience overload: A is a sparse SPD matrix, the preconditioner is its
/// inverse diagonal.
PcgResult pcg(const SparseMatrix& a, std::span<const double> b,
              std::span<const double> x0, const PcgOptions& options = {});

/// Extremal spectral quantities driving the accelerated step sizes.
struct SpectralEstimates {
  double sigma_T = 0.0;  ///< largest singular value of the contact operator
  double mu_pi = 0.0;    ///< smallest eigenvalue of the stiffness matrix
};

inline constexpr std::uint64_t kPowerIterationSeed = 0x5eed'c0ffee'2021ULL;

/// Largest singular value via power iteration on T^T T or T T^T, whichever
/// is smaller. Terminates when the Rayleigh quotient changes by at most
/// `tol` relative between sweeps.
double max_singular_value(const SparseMatrix& t, double tol = 1e-8,
                          std::size_t maxit = 1000000);

/// Smallest eigenvalue of an SPD matrix via inverse iteration. Inner solves
/// use pcg with relative tolerance `inner_tol`.
double min_eigenvalue(const SparseMatrix& k, double tol = 1e-8,
                      std::size_t maxit = 1000000, double inner_tol = 1e-10,
                      std::size_t inner_maxit = 0);

}  // namespace pdcontact
