#pragma once

#include <span>
#include <vector>

#include "pdcontact/problem.hpp"

namespace pdcontact::verify {

enum class NodeState { free, slip, stick };

const char* to_string(NodeState s);

struct StateFractions {
  double free = 0.0;
  double slip = 0.0;
  double stick = 0.0;
};

/// Accuracy of a candidate (du, r) for the frictional contact problem.
struct ResidualReport {
  /// || K du - p - Tn r_n - Tt r_t ||
  double resid_eq = 0.0;
  /// | sum_j < (-g_j - mu ||Tt_j^T du|| + tn_j^T du, Tt_j^T du), (r_nj, r_tj) > |
  double resid_compl = 0.0;
  /// || min(g - Tn^T du, 0) ||
  double resid_pen = 0.0;
  /// max_j max(0, ||r_tj|| + mu r_nj); zero for iterates produced by projection.
  double cone_violation = 0.0;
  StateFractions fractions;
  std::vector<NodeState> states;
};

/// Node states use tol = tol_factor * max(1, ||du||_inf): a node without
/// reaction is free, a loaded node with ||Tt_j^T du|| <= tol sticks, every
/// other loaded node slips.
ResidualReport residual_report(const ProblemInstance& problem, std::span<const double> du,
                               std::span<const double> r, double tol_factor = 1e-9);

/// Residuals of the fixed-bound problem where g_j + mu ||Tt_j^T du|| is
/// frozen to g_tilde_j (the convex subproblem one primal-dual sweep solves).
struct FixedBoundResiduals {
  double resid_eq = 0.0;
  /// | sum_j < (-g~_j + tn_j^T du, Tt_j^T du), r_j > |
  double resid_compl = 0.0;
  /// max_j max(0, v_nj + mu ||v_tj||) for v_j = (-g~_j + tn_j^T du, Tt_j^T du)
  double dual_violation = 0.0;
  double cone_violation = 0.0;
};

FixedBoundResiduals fixed_bound_residuals(const ProblemInstance& problem,
                                          std::span<const double> g_tilde,
                                          std::span<const double> du, std::span<const double> r);

/// Splits node-major reactions (r_n1, r_t1, ..., r_nc, r_tc) into r_n and r_t.
void split_reactions(const ContactGeometry& contact, std::span<const double> r, Vector& r_n,
                     Vector& r_t);
/// || K du - p - Tn r_n - Tt r_t ||
double equilibrium_residual(const ProblemInstance& problem, std::span<const double> du,
                            std::span<const double> r);

}  // namespace pdcontact::verify
