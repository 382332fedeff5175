#include "pdcontact/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace pdcontact {

namespace {

Vector seeded_unit_vector(std::size_t n) {
  std::mt19937_64 rng(kPowerIterationSeed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (double& x : v) x = dist(rng);
  const double nv = norm2(v);
  for (double& x : v) x /= nv;
  return v;
}

}  // namespace

PcgResult pcg(const LinearOperator& a, std::span<const double> b,
              std::span<const double> x0, std::span<const double> inv_diag,
              const PcgOptions& options) {
  const std::size_t n = b.size();
  require_size(x0.size(), n, "pcg initial guess");
  require_size(inv_diag.size(), n, "pcg preconditioner");
  if (!(options.tol > 0.0)) throw std::invalid_argument("pcg: tol must be positive");

  PcgResult res;
  res.x.assign(x0.begin(), x0.end());
  if (options.keep_iterates) res.iterates.push_back(res.x);

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    res.converged = true;
    return res;
  }
  const double target = options.tol * bnorm;

  Vector r(n), z(n), p(n), q(n);
  a(res.x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  double rnorm = norm2(r);
  if (rnorm <= target) {
    res.converged = true;
    res.relative_residual = rnorm / bnorm;
    return res;
  }

  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);

  while (res.iterations < options.maxit) {
    a(p, q);
    const double curvature = dot(p, q);
    if (!(curvature > 0.0) || !std::isfinite(curvature)) {
      throw BreakdownError("pcg: non-positive curvature at iteration " +
                           std::to_string(res.iterations));
    }
    const double step = rz / curvature;
    axpy(step, p, res.x);
    axpy(-step, q, r);
    ++res.iterations;
    if (options.keep_iterates) res.iterates.push_back(res.x);

    rnorm = norm2(r);
    bool restart = false;
    if (rnorm <= target) {
      // Confirm against the true residual; the recurrence can drift.
      a(res.x, q);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
      rnorm = norm2(r);
      if (rnorm <= target) {
        res.converged = true;
        break;
      }
      restart = true;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = restart ? 0.0 : rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  res.relative_residual = rnorm / bnorm;
  return res;
}

PcgResult pcg(const SparseMatrix& a, std::span<const double> b,
              std::span<const double> x0, const PcgOptions& options) {
  if (a.rows() != a.cols()) throw DimensionError("pcg: matrix is not square");
  require_size(b.size(), a.rows(), "pcg right-hand side");
  Vector inv_diag = a.diagonal_entries();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw BreakdownError("pcg: non-positive diagonal entry");
    d = 1.0 / d;
  }
  const LinearOperator op = [&a](std::span<const double> x, std::span<double> y) { spmv(a, x, y); };
  return pcg(op, b, x0, inv_diag, options);
}

double max_singular_value(const SparseMatrix& t, double tol, std::size_t maxit) {
  if (t.nnz() == 0 || norm_inf(t.values()) == 0.0) {
    throw std::invalid_argument("max_singular_value: matrix is zero");
  }
  // Iterate on the Gram matrix of the shorter side.
  const bool gram_of_columns = t.cols() <= t.rows();
  const std::size_t n = gram_of_columns ? t.cols() : t.rows();
  const std::size_t inner = gram_of_columns ? t.rows() : t.cols();

  Vector x = seeded_unit_vector(n);
  Vector y(inner), z(n);
  double lambda_prev = -1.0;
  for (std::size_t it = 0; it < maxit; ++it) {
    if (gram_of_columns) {
      spmv(t, x, y);
      spmv_transpose(t, y, z);
    } else {
      spmv_transpose(t, x, y);
      spmv(t, y, z);
    }
    const double lambda = dot(y, y);  // Rayleigh quotient, x has unit norm
    const double zn = norm2(z);
    if (zn == 0.0) {
      throw ConvergenceError("max_singular_value: start vector in the null space");
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / zn;
    if (lambda_prev >= 0.0 && std::abs(lambda - lambda_prev) <= tol * lambda) {
      return std::sqrt(lambda);
    }
    lambda_prev = lambda;
  }
  throw ConvergenceError("max_singular_value: no convergence within " + std::to_string(maxit) +
                         " iterations");
}

double min_eigenvalue(const SparseMatrix& k, double tol, std::size_t maxit, double inner_tol,
                      std::size_t inner_maxit) {
  if (k.rows() != k.cols()) throw DimensionError("min_eigenvalue: matrix is not square");
  const std::size_t n = k.rows();
  if (n == 0) throw std::invalid_argument("min_eigenvalue: empty matrix");
  if (inner_maxit == 0) inner_maxit = std::max<std::size_t>(1000, 10 * n);

  PcgOptions inner{inner_tol, inner_maxit, false};
  Vector x = seeded_unit_vector(n);
  Vector kx = spmv(k, x);
  double lambda = dot(x, kx);
  Vector guess(n);
  for (std::size_t it = 0; it < maxit; ++it) {
    // K y = x; y is close to x / lambda once the iteration settles.
    for (std::size_t i = 0; i < n; ++i) guess[i] = lambda > 0.0 ? x[i] / lambda : 0.0;
    PcgResult solve = pcg(k, x, guess, inner);
    if (!solve.converged) {
      throw ConvergenceError("min_eigenvalue: inner pcg did not converge (relative residual " +
                             std::to_string(solve.relative_residual) + ")");
    }
    const double yn = norm2(solve.x);
    for (std::size_t i = 0; i < n; ++i) x[i] = solve.x[i] / yn;
    spmv(k, x, kx);
    const double next = dot(x, kx);
    if (std::abs(next - lambda) <= tol * std::abs(next)) return next;
    lambda = next;
  }
  throw ConvergenceError("min_eigenvalue: no convergence within " + std::to_string(maxit) +
                         " iterations");
}

}  // namespace pdcontact
