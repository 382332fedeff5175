#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "pdcontact/problem.hpp"

namespace pdcontact::verify {

/// K = R+^orthant x (L^soc_dim)^soc_count.
struct ConeDescriptor {
  std::size_t orthant = 0;
  std::size_t soc_count = 0;
  std::size_t soc_dim = 0;

  std::size_t size() const { return orthant + soc_count * soc_dim; }
  /// e.g. "R+^5, (SOC^3)^5"
  std::string describe() const;
};

/// Second-order cone linear complementarity problem
///   K ∋ x ⊥ y ∈ K,   y = M11 x + M12 v + w1,   M21 x + M22 v + w2 = 0
/// with x = [g - Tn^T du; (lambda_j, Tt_j^T du)_j], y = [-r_n; (-mu r_nj, r_tj)_j]
/// and v = [du; lambda; r_n; r_t].
struct SOCLCPForm {
  SparseMatrix M11, M12, M21, M22;
  Vector w1, w2;
  ConeDescriptor cone;
  std::size_t d = 0;
  std::size_t c = 0;
  int m = 2;
  double mu = 0.0;

  std::size_t x_size() const { return cone.size(); }
  std::size_t v_size() const { return d + (2 + static_cast<std::size_t>(m)) * c; }
};

SOCLCPForm build_soclcp(const ProblemInstance& problem);

/// (x, y, v) of a contact solution, assembled directly from the physical
/// quantities rather than through the blocks.
struct SoclcpPoint {
  Vector x, y, v;
};

/// An empty `lambdas` selects lambda_j = ||Tt_j^T du||.
SoclcpPoint embed_solution(const ProblemInstance& problem, std::span<const double> du,
                           std::span<const double> r, std::span<const double> lambdas = {});

struct SoclcpReport {
  double tol = 0.0;
  double x_cone_violation = 0.0;
  double y_cone_violation = 0.0;
  /// sum over cone blocks of |<x_i, y_i>|
  double complementarity = 0.0;
  /// || y - M11 x - M12 v - w1 ||
  double first_equation = 0.0;
  /// || M21 x + M22 v + w2 ||
  double second_equation = 0.0;

  bool x_in_cone() const { return x_cone_violation <= tol; }
  bool y_in_cone() const { return y_cone_violation <= tol; }
  bool complementary() const { return complementarity <= tol; }
  bool first_equation_holds() const { return first_equation <= tol; }
  bool second_equation_holds() const { return second_equation <= tol; }
  bool passed() const {
    return x_in_cone() && y_in_cone() && complementary() && first_equation_holds() &&
           second_equation_holds();
  }
};

SoclcpReport verify_soclcp(const SOCLCPForm& form, const SoclcpPoint& point, double tol);

/// build_soclcp + embed_solution + verify_soclcp.
SoclcpReport verify_soclcp(const ProblemInstance& problem, std::span<const double> du,
                           std::span<const double> r, std::span<const double> lambdas,
                           double tol);

/// Writes M11.mtx, M12.mtx, M21.mtx, M22.mtx, w1.mtx, w2.mtx and
/// manifest.json into `dir` (created if missing).
void export_matrix_market(const SOCLCPForm& form, const std::filesystem::path& dir);

/// Reads back a directory written by export_matrix_market.
SOCLCPForm import_matrix_market(const std::filesystem::path& dir);

}  // namespace pdcontact::verify
