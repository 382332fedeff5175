#pragma once

#include <cstddef>
#include <string>

#include "pdcontact/sparse_matrix.hpp"

namespace pdcontact {

/// Contact kinematics for c candidate nodes against a rigid obstacle.
///
/// The gap after an increment du is  g_j - tn_j^T du  and the tangential
/// slip is  Tt_j^T du. Tn holds one unit column per node; Tt holds m
/// orthonormal columns per node (node-major), orthogonal to that node's
/// normal column.
struct ContactGeometry {
  int m = 2;
  std::size_t c = 0;
  SparseMatrix Tn;  // d x c
  SparseMatrix Tt;  // d x (m c)
  Vector g;         // initial gaps, >= 0

  std::size_t block_size() const { return 1 + static_cast<std::size_t>(m); }
};

/// Provenance of generated benchmark problems; informational only.
struct ProblemInfo {
  std::string kind = "custom";  // example1 | example2 | custom
  int n_x = 0, n_y = 0, n_z = 0;
  double young = 1.0;
  double poisson = 0.3;
  double traction = 0.0;
  double gap = 0.0;
  std::string bc = "clamped";  // clamped | free
  double extent_x = 0.0, extent_y = 0.0, extent_z = 0.0;
};

/// One incremental step:  K du - p = Tn r_n + Tt r_t  with Coulomb friction
/// and unilateral contact at every candidate node.
struct ProblemInstance {
  SparseMatrix K;  // d x d, symmetric
  Vector p;        // p^{l+1} - K u^l
  ContactGeometry contact;
  double mu = 0.5;
  ProblemInfo info;

  std::size_t dofs() const { return K.rows(); }
};

/// Checks every dimension and sign invariant; throws DimensionError or
/// std::invalid_argument describing the first violation.
void validate(const ProblemInstance& problem);

/// T = [tn_1 Tt_1 ... tn_c Tt_c], d x (1+m)c. Reactions are stored in the
/// same node-major order (r_n1, r_t1, ..., r_nc, r_tc).
SparseMatrix assemble_contact_operator(const ContactGeometry& contact);

}  // namespace pdcontact
