#pragma once

#include <array>
#include <span>

namespace pdcontact {

/// Contact reaction at one node: normal part (non-positive inside the
/// friction cone) and an m-dimensional tangential part, m in {1, 2}.
struct ReactionPoint {
  double normal = 0.0;
  std::array<double, 2> tangential{};  // entries past m stay zero
  int m = 2;

  std::span<const double> tangent() const { return {tangential.data(), static_cast<std::size_t>(m)}; }
  std::span<double> tangent() { return {tangential.data(), static_cast<std::size_t>(m)}; }
};

/// Euclidean norm of a tangential vector. Every cone routine goes through
/// this one function so membership tests see the same rounding as the
/// projection that produced the point.
double tangential_norm(std::span<const double> t);

/// Projection onto the Coulomb friction cone
///   F = { (r_n, r_t) : -mu r_n >= ||r_t|| }.
///
/// block = (s_n, s_t...) of length 1 + m is overwritten by its projection.
/// Branches, in order:
///   lambda1 = -mu s_n - ||s_t|| >= 0  -> unchanged (already in F)
///   lambda2 = -s_n + mu ||s_t|| <= 0  -> origin (in the polar cone)
///   otherwise lambda2 / (1 + mu^2) * (-1, mu s_t / ||s_t||)
/// The boundary case is nudged by at most a few ulps in r_n so that the
/// result satisfies the membership inequality exactly in floating point;
/// projecting it again is therefore the identity.
void project_friction_cone_inplace(std::span<double> block, double mu);

ReactionPoint project_friction_cone(double s_n, std::span<const double> s_t, double mu);

/// Projection onto the second-order cone L = { (x0, x1) : x0 >= ||x1|| },
/// via the spectral decomposition x = l1 u1 + l2 u2 with l = x0 -/+ ||x1||.
/// Returned in the same (scalar, vector) layout as ReactionPoint.
ReactionPoint project_soc(double x0, std::span<const double> x1);

/// -mu r_n + tol >= ||r_t||
bool in_friction_cone(const ReactionPoint& r, double mu, double tol = 0.0);
bool in_friction_cone(std::span<const double> block, double mu, double tol = 0.0);

/// Dual cone F* = { (v_n, v_t) : -v_n >= mu ||v_t|| }, tested as
/// -v_n + tol >= mu ||v_t||.
bool in_dual_cone(double v_n, std::span<const double> v_t, double mu, double tol = 0.0);

/// Amount by which (x0, x1) misses the second-order cone, max(0, ||x1|| - x0).
double soc_violation(double x0, std::span<const double> x1);

}  // namespace pdcontact
