#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pdcontact/problem.hpp"

namespace pdcontact::fem {

/// Uniform grid of Q4 (dim 2) or H8 (dim 3) elements on [0, n_x h_x] x ...
/// Nodes are numbered x-fastest, then y, then z.
struct StructuredMesh {
  int dim = 2;
  int n_x = 1, n_y = 1, n_z = 0;
  double h_x = 1.0, h_y = 1.0, h_z = 1.0;

  StructuredMesh() = default;
  StructuredMesh(int n_x, int n_y, double h_x, double h_y);
  StructuredMesh(int n_x, int n_y, int n_z, double h_x, double h_y, double h_z);

  std::size_t node_count() const;
  std::size_t element_count() const;
  std::size_t node(int i, int j, int k = 0) const;
  std::array<double, 3> coordinates(std::size_t node) const;
  /// Node ids of element (i, j[, k]) in the usual counter-clockwise order,
  /// bottom layer first for hexahedra.
  std::vector<std::size_t> element_nodes(int i, int j, int k = 0) const;
};

/// Maps (node, component) to a free dof index, or -1 when constrained.
class DofMap {
 public:
  DofMap(std::size_t nodes, int components);

  void fix_node(std::size_t node);
  /// Renumbers free dofs consecutively; call after all fix_node calls.
  void finalize();

  std::ptrdiff_t dof(std::size_t node, int component) const {
    return map_[node * static_cast<std::size_t>(components_) + static_cast<std::size_t>(component)];
  }
  std::size_t free_dofs() const { return free_; }
  std::size_t total_dofs() const { return map_.size(); }
  int components() const { return components_; }
  bool is_fixed(std::size_t node) const;

  /// Drops constrained rows (and columns) of a full-size vector or matrix.
  Vector restrict_vector(std::span<const double> full) const;
  SparseMatrix restrict_matrix(const SparseMatrix& full) const;
  Vector expand_vector(std::span<const double> reduced) const;

 private:
  int components_;
  std::size_t free_ = 0;
  std::vector<std::ptrdiff_t> map_;
};

/// 8x8 plane-stress stiffness of an h_x x h_y rectangle (unit thickness),
/// 2x2 Gauss rule, row-major, dofs ordered (u0, v0, u1, v1, ...).
std::array<double, 64> q4_element_stiffness(double h_x, double h_y, double young, double poisson);

/// 24x24 stiffness of an h_x x h_y x h_z brick, 2x2x2 Gauss rule.
std::array<double, 576> h8_element_stiffness(double h_x, double h_y, double h_z, double young,
                                             double poisson);

/// Global, unconstrained stiffness matrices.
SparseMatrix assemble_q4_plane_stress(const StructuredMesh& mesh, double young, double poisson);
SparseMatrix assemble_h8(const StructuredMesh& mesh, double young, double poisson);

/// Consistent nodal forces (full dof numbering) for a uniform traction
/// `value` along `component` applied to the top boundary (y = max in 2D,
/// z = max in 3D).
Vector top_traction_load(const StructuredMesh& mesh, double value, int component);

/// Rigid flat obstacle { x : normal . x = offset }. `normal` is a unit
/// vector pointing from the obstacle towards the body.
struct Plane {
  std::array<double, 3> normal{0.0, 0.0, 1.0};
  double offset = 0.0;
};

/// Builds Tn, Tt and g for the candidate nodes. Tn_j = -normal so that the
/// gap  g_j - Tn_j^T du  shrinks when the node moves towards the obstacle.
/// Throws if a candidate starts out penetrating the obstacle.
ContactGeometry contact_frames(const StructuredMesh& mesh, const DofMap& dofs,
                               std::span<const std::size_t> candidates, const Plane& obstacle);

/// Default benchmark settings.
struct BenchmarkOptions {
  double traction = 0.0;
  double gap = 0.0;
  double mu = 0.5;
  double young = 1.0;
  double poisson = 0.3;
  /// Body length along x; element size is length / N_X.
  double length = 1.0;
  /// "clamped": the x = 0 face is fixed in every direction (SPD stiffness).
  /// "free": no supports; the stiffness keeps its rigid-body null space.
  std::string bc = "clamped";
};

BenchmarkOptions example1_defaults();
BenchmarkOptions example2_defaults();

/// Plane-stress body of N_X x N_Y square Q4 elements (N_X = 2.5 N_Y, default
/// extent 1 x 0.4) over a flat obstacle, pressed by a downward traction on
/// its top edge.
ProblemInstance build_example1(int n_y, const BenchmarkOptions& options = example1_defaults());

/// Box of N_X x N_Y x N_Z cubic H8 elements (N_X = 2 N_Y = 2 N_Z, default
/// extent 2 x 1 x 1); the bottom face rests over a flat obstacle, the top
/// face carries the load.
ProblemInstance build_example2(int n_y, const BenchmarkOptions& options = example2_defaults());

}  // namespace pdcontact::fem
