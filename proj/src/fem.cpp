#include "pdcontact/fem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pdcontact::fem {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

void check_material(double young, double poisson) {
  if (!(young > 0.0) || !std::isfinite(young)) {
    throw std::invalid_argument("Young's modulus must be positive");
  }
  if (!(poisson > -1.0 && poisson < 0.5)) {
    throw std::invalid_argument("Poisson's ratio must lie in (-1, 0.5)");
  }
}

template <std::size_t N>
void symmetrize(std::array<double, N * N>& a) {
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      const double s = 0.5 * (a[i * N + j] + a[j * N + i]);
      a[i * N + j] = s;
      a[j * N + i] = s;
    }
  }
}

template <std::size_t N>
void scatter(const std::array<double, N * N>& ke, std::span<const std::size_t> dofs,
             std::vector<Triplet>& out) {
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = 0; b < N; ++b) out.push_back({dofs[a], dofs[b], ke[a * N + b]});
  }
}

}  // namespace

StructuredMesh::StructuredMesh(int nx, int ny, double hx, double hy)
    : dim(2), n_x(nx), n_y(ny), n_z(0), h_x(hx), h_y(hy), h_z(0.0) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("element counts must be at least 1");
  if (!(hx > 0.0) || !(hy > 0.0)) throw std::invalid_argument("element sizes must be positive");
}

StructuredMesh::StructuredMesh(int nx, int ny, int nz, double hx, double hy, double hz)
    : dim(3), n_x(nx), n_y(ny), n_z(nz), h_x(hx), h_y(hy), h_z(hz) {
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("element counts must be at least 1");
  if (!(hx > 0.0) || !(hy > 0.0) || !(hz > 0.0)) {
    throw std::invalid_argument("element sizes must be positive");
  }
}

std::size_t StructuredMesh::node_count() const {
  const std::size_t layer = static_cast<std::size_t>(n_x + 1) * static_cast<std::size_t>(n_y + 1);
  return dim == 2 ? layer : layer * static_cast<std::size_t>(n_z + 1);
}

std::size_t StructuredMesh::element_count() const {
  const std::size_t layer = static_cast<std::size_t>(n_x) * static_cast<std::size_t>(n_y);
  return dim == 2 ? layer : layer * static_cast<std::size_t>(n_z);
}

std::size_t StructuredMesh::node(int i, int j, int k) const {
  const auto nx1 = static_cast<std::size_t>(n_x + 1);
  const auto ny1 = static_cast<std::size_t>(n_y + 1);
  return static_cast<std::size_t>(i) + nx1 * (static_cast<std::size_t>(j) + ny1 * static_cast<std::size_t>(k));
}

std::array<double, 3> StructuredMesh::coordinates(std::size_t id) const {
  const auto nx1 = static_cast<std::size_t>(n_x + 1);
  const auto ny1 = static_cast<std::size_t>(n_y + 1);
  const std::size_t i = id % nx1;
  const std::size_t j = (id / nx1) % ny1;
  const std::size_t k = id / (nx1 * ny1);
  return {static_cast<double>(i) * h_x, static_cast<double>(j) * h_y,
          dim == 2 ? 0.0 : static_cast<double>(k) * h_z};
}

std::vector<std::size_t> StructuredMesh::element_nodes(int i, int j, int k) const {
  if (dim == 2) return {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
  return {node(i, j, k),         node(i + 1, j, k),         node(i + 1, j + 1, k),
          node(i, j + 1, k),     node(i, j, k + 1),         node(i + 1, j, k + 1),
          node(i + 1, j + 1, k + 1), node(i, j + 1, k + 1)};
}

DofMap::DofMap(std::size_t nodes, int components)
    : components_(components), map_(nodes * static_cast<std::size_t>(components), 0) {}

void DofMap::fix_node(std::size_t node) {
  for (int c = 0; c < components_; ++c) {
    map_[node * static_cast<std::size_t>(components_) + static_cast<std::size_t>(c)] = -1;
  }
}

void DofMap::finalize() {
  std::ptrdiff_t next = 0;
  for (auto& entry : map_) {
    if (entry >= 0) entry = next++;
  }
  free_ = static_cast<std::size_t>(next);
}

bool DofMap::is_fixed(std::size_t node) const {
  for (int c = 0; c < components_; ++c) {
    if (dof(node, c) < 0) return true;
  }
  return false;
}

Vector DofMap::restrict_vector(std::span<const double> full) const {
  require_size(full.size(), map_.size(), "restrict_vector");
  Vector out(free_);
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i] >= 0) out[static_cast<std::size_t>(map_[i])] = full[i];
  }
  return out;
}

Vector DofMap::expand_vector(std::span<const double> reduced) const {
  require_size(reduced.size(), free_, "expand_vector");
  Vector out(map_.size(), 0.0);
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i] >= 0) out[i] = reduced[static_cast<std::size_t>(map_[i])];
  }
  return out;
}

SparseMatrix DofMap::restrict_matrix(const SparseMatrix& full) const {
  require_size(full.rows(), map_.size(), "restrict_matrix rows");
  require_size(full.cols(), map_.size(), "restrict_matrix cols");
  std::vector<Triplet> kept;
  kept.reserve(full.nnz());
  for (const auto& t : full.to_triplets()) {
    const auto r = map_[t.row];
    const auto c = map_[t.col];
    if (r >= 0 && c >= 0) kept.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), t.value});
  }
  return SparseMatrix::from_triplets(free_, free_, kept);
}

std::array<double, 64> q4_element_stiffness(double hx, double hy, double young, double poisson) {
  check_material(young, poisson);
  static constexpr double xi_a[4] = {-1.0, 1.0, 1.0, -1.0};
  static constexpr double eta_a[4] = {-1.0, -1.0, 1.0, 1.0};
  const double f = young / (1.0 - poisson * poisson);
  const double dmat[3][3] = {{f, f * poisson, 0.0}, {f * poisson, f, 0.0}, {0.0, 0.0, f * 0.5 * (1.0 - poisson)}};
  const double det_j = 0.25 * hx * hy;

  std::array<double, 64> ke{};
  for (double xi : {-kGauss, kGauss}) {
    for (double eta : {-kGauss, kGauss}) {
      double b[3][8] = {};
      for (int a = 0; a < 4; ++a) {
        const double dx = 0.25 * xi_a[a] * (1.0 + eta * eta_a[a]) * 2.0 / hx;
        const double dy = 0.25 * eta_a[a] * (1.0 + xi * xi_a[a]) * 2.0 / hy;
        b[0][2 * a] = dx;
        b[1][2 * a + 1] = dy;
        b[2][2 * a] = dy;
        b[2][2 * a + 1] = dx;
      }
      double db[3][8] = {};
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 8; ++col) {
          for (int s = 0; s < 3; ++s) db[r][col] += dmat[r][s] * b[s][col];
        }
      }
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
          double acc = 0.0;
          for (int r = 0; r < 3; ++r) acc += b[r][i] * db[r][j];
          ke[static_cast<std::size_t>(i * 8 + j)] += acc * det_j;
        }
      }
    }
  }
  symmetrize<8>(ke);
  return ke;
}

std::array<double, 576> h8_element_stiffness(double hx, double hy, double hz, double young,
                                             double poisson) {
  check_material(young, poisson);
  static constexpr double xa[8] = {-1, 1, 1, -1, -1, 1, 1, -1};
  static constexpr double ya[8] = {-1, -1, 1, 1, -1, -1, 1, 1};
  static constexpr double za[8] = {-1, -1, -1, -1, 1, 1, 1, 1};
  const double lame = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  const double shear = young / (2.0 * (1.0 + poisson));
  double dmat[6][6] = {};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) dmat[i][j] = lame;
    dmat[i][i] = lame + 2.0 * shear;
    dmat[i + 3][i + 3] = shear;
  }
  const double det_j = hx * hy * hz / 8.0;

  std::array<double, 576> ke{};
  for (double xi : {-kGauss, kGauss}) {
    for (double eta : {-kGauss, kGauss}) {
      for (double zeta : {-kGauss, kGauss}) {
        double b[6][24] = {};
        for (int a = 0; a < 8; ++a) {
          const double dx = 0.125 * xa[a] * (1 + eta * ya[a]) * (1 + zeta * za[a]) * 2.0 / hx;
          const double dy = 0.125 * ya[a] * (1 + xi * xa[a]) * (1 + zeta * za[a]) * 2.0 / hy;
          const double dz = 0.125 * za[a] * (1 + xi * xa[a]) * (1 + eta * ya[a]) * 2.0 / hz;
          const int u = 3 * a, v = 3 * a + 1, w = 3 * a + 2;
          b[0][u] = dx;
          b[1][v] = dy;
          b[2][w] = dz;
          b[3][u] = dy;
          b[3][v] = dx;
          b[4][v] = dz;
          b[4][w] = dy;
          b[5][u] = dz;
          b[5][w] = dx;
        }
        double db[6][24] = {};
        for (int r = 0; r < 6; ++r) {
          for (int col = 0; col < 24; ++col) {
            for (int s = 0; s < 6; ++s) db[r][col] += dmat[r][s] * b[s][col];
          }
        }
        for (int i = 0; i < 24; ++i) {
          for (int j = 0; j < 24; ++j) {
            double acc = 0.0;
            for (int r = 0; r < 6; ++r) acc += b[r][i] * db[r][j];
            ke[static_cast<std::size_t>(i * 24 + j)] += acc * det_j;
          }
        }
      }
    }
  }
  symmetrize<24>(ke);
  return ke;
}

SparseMatrix assemble_q4_plane_stress(const StructuredMesh& mesh, double young, double poisson) {
  if (mesh.dim != 2) throw std::invalid_argument("Q4 assembly needs a 2D mesh");
  const auto ke = q4_element_stiffness(mesh.h_x, mesh.h_y, young, poisson);
  std::vector<Triplet> entries;
  entries.reserve(mesh.element_count() * 64);
  std::array<std::size_t, 8> dofs{};
  for (int j = 0; j < mesh.n_y; ++j) {
    for (int i = 0; i < mesh.n_x; ++i) {
      const auto nodes = mesh.element_nodes(i, j);
      for (std::size_t a = 0; a < 4; ++a) {
        dofs[2 * a] = 2 * nodes[a];
        dofs[2 * a + 1] = 2 * nodes[a] + 1;
      }
      scatter<8>(ke, dofs, entries);
    }
  }
  const std::size_t n = 2 * mesh.node_count();
  return SparseMatrix::from_triplets(n, n, entries);
}

SparseMatrix assemble_h8(const StructuredMesh& mesh, double young, double poisson) {
  if (mesh.dim != 3) throw std::invalid_argument("H8 assembly needs a 3D mesh");
  const auto ke = h8_element_stiffness(mesh.h_x, mesh.h_y, mesh.h_z, young, poisson);
  std::vector<Triplet> entries;
  entries.reserve(mesh.element_count() * 576);
  std::array<std::size_t, 24> dofs{};
  for (int k = 0; k < mesh.n_z; ++k) {
    for (int j = 0; j < mesh.n_y; ++j) {
      for (int i = 0; i < mesh.n_x; ++i) {
        const auto nodes = mesh.element_nodes(i, j, k);
        for (std::size_t a = 0; a < 8; ++a) {
          for (std::size_t c = 0; c < 3; ++c) dofs[3 * a + c] = 3 * nodes[a] + c;
        }
        scatter<24>(ke, dofs, entries);
      }
    }
  }
  const std::size_t n = 3 * mesh.node_count();
  return SparseMatrix::from_triplets(n, n, entries);
}

Vector top_traction_load(const StructuredMesh& mesh, double value, int component) {
  if (component < 0 || component >= mesh.dim) throw std::invalid_argument("bad load component");
  const auto dim = static_cast<std::size_t>(mesh.dim);
  Vector f(dim * mesh.node_count(), 0.0);
  const auto comp = static_cast<std::size_t>(component);
  if (mesh.dim == 2) {
    const double share = 0.5 * value * mesh.h_x;
    for (int i = 0; i < mesh.n_x; ++i) {
      f[dim * mesh.node(i, mesh.n_y) + comp] += share;
      f[dim * mesh.node(i + 1, mesh.n_y) + comp] += share;
    }
  } else {
    const double share = 0.25 * value * mesh.h_x * mesh.h_y;
    for (int j = 0; j < mesh.n_y; ++j) {
      for (int i = 0; i < mesh.n_x; ++i) {
        for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {1, 1}, {0, 1}}) {
          f[dim * mesh.node(i + di, j + dj, mesh.n_z) + comp] += share;
        }
      }
    }
  }
  return f;
}

ContactGeometry contact_frames(const StructuredMesh& mesh, const DofMap& dofs,
                               std::span<const std::size_t> candidates, const Plane& obstacle) {
  const int dim = mesh.dim;
  if (dofs.components() != dim) throw std::invalid_argument("dof map does not match mesh dimension");
  std::array<double, 3> n = obstacle.normal;
  if (dim == 2) n[2] = 0.0;
  const double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (!(nn > 0.0)) throw std::invalid_argument("obstacle normal must be nonzero");
  for (double& v : n) v /= nn;

  // Orthonormal tangential frame of the obstacle plane.
  std::vector<std::array<double, 3>> tangents;
  if (dim == 2) {
    tangents.push_back({n[1], -n[0], 0.0});
  } else {
    int axis = 0;
    for (int a = 1; a < 3; ++a) {
      if (std::abs(n[static_cast<std::size_t>(a)]) < std::abs(n[static_cast<std::size_t>(axis)])) axis = a;
    }
    std::array<double, 3> t1{};
    t1[static_cast<std::size_t>(axis)] = 1.0;
    const double proj = t1[0] * n[0] + t1[1] * n[1] + t1[2] * n[2];
    for (std::size_t i = 0; i < 3; ++i) t1[i] -= proj * n[i];
    const double t1n = std::sqrt(t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]);
    for (double& v : t1) v /= t1n;
    const std::array<double, 3> t2{n[1] * t1[2] - n[2] * t1[1], n[2] * t1[0] - n[0] * t1[2],
                                   n[0] * t1[1] - n[1] * t1[0]};
    tangents.push_back(t1);
    tangents.push_back(t2);
  }

  ContactGeometry geo;
  geo.m = dim - 1;
  geo.c = candidates.size();
  geo.g.resize(geo.c);
  const auto m = static_cast<std::size_t>(geo.m);
  std::vector<Triplet> tn, tt;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const std::size_t node = candidates[j];
    if (node >= mesh.node_count()) throw std::out_of_range("candidate node out of range");
    const auto x = mesh.coordinates(node);
    const double dist = n[0] * x[0] + n[1] * x[1] + n[2] * x[2] - obstacle.offset;
    if (dist < 0.0) {
      throw std::invalid_argument("candidate node " + std::to_string(node) +
                                  " initially penetrates the obstacle");
    }
    geo.g[j] = dist;
    for (int comp = 0; comp < dim; ++comp) {
      const auto dof = dofs.dof(node, comp);
      if (dof < 0) {
        throw std::invalid_argument("candidate node " + std::to_string(node) + " is constrained");
      }
      const auto row = static_cast<std::size_t>(dof);
      const auto ci = static_cast<std::size_t>(comp);
      if (n[ci] != 0.0) tn.push_back({row, j, -n[ci]});
      for (std::size_t a = 0; a < m; ++a) {
        if (tangents[a][ci] != 0.0) tt.push_back({row, m * j + a, tangents[a][ci]});
      }
    }
  }
  geo.Tn = SparseMatrix::from_triplets(dofs.free_dofs(), geo.c, tn);
  geo.Tt = SparseMatrix::from_triplets(dofs.free_dofs(), m * geo.c, tt);
  return geo;
}

BenchmarkOptions example1_defaults() {
  BenchmarkOptions o;
  o.traction = 0.01;
  o.gap = 0.01;
  return o;
}

BenchmarkOptions example2_defaults() {
  BenchmarkOptions o;
  o.traction = 5e-3;
  o.gap = 5e-3;
  o.length = 2.0;
  return o;
}

namespace {

bool clamped(const BenchmarkOptions& options) {
  if (options.bc == "clamped") return true;
  if (options.bc == "free") return false;
  throw std::invalid_argument("unknown boundary condition '" + options.bc + "'");
}

void check_benchmark(const BenchmarkOptions& options) {
  check_material(options.young, options.poisson);
  if (!(options.gap >= 0.0)) throw std::invalid_argument("gap must be non-negative");
  if (!(options.mu >= 0.0)) throw std::invalid_argument("friction coefficient must be non-negative");
  if (!(options.length > 0.0) || !std::isfinite(options.length)) {
    throw std::invalid_argument("body length must be positive");
  }
}

}  // namespace

ProblemInstance build_example1(int n_y, const BenchmarkOptions& options) {
  if (n_y < 1) throw std::invalid_argument("N_Y must be at least 1");
  if ((5 * n_y) % 2 != 0) {
    throw std::invalid_argument("N_X = 2.5 N_Y must be an integer; N_Y must be even");
  }
  check_benchmark(options);
  const bool fix_left = clamped(options);
  const int n_x = 5 * n_y / 2;
  const double h = options.length / n_x;
  const StructuredMesh mesh(n_x, n_y, h, h);

  DofMap dofs(mesh.node_count(), 2);
  if (fix_left) {
    for (int j = 0; j <= n_y; ++j) dofs.fix_node(mesh.node(0, j));
  }
  dofs.finalize();

  std::vector<std::size_t> candidates;
  for (int i = fix_left ? 1 : 0; i <= n_x; ++i) candidates.push_back(mesh.node(i, 0));

  ProblemInstance prob;
  prob.K = dofs.restrict_matrix(assemble_q4_plane_stress(mesh, options.young, options.poisson));
  prob.p = dofs.restrict_vector(top_traction_load(mesh, -options.traction, 1));
  prob.contact = contact_frames(mesh, dofs, candidates, Plane{{0.0, 1.0, 0.0}, -options.gap});
  prob.mu = options.mu;
  prob.info = ProblemInfo{"example1", n_x, n_y, 0, options.young, options.poisson,
                          options.traction, options.gap, options.bc, n_x * h, n_y * h, 0.0};
  return prob;
}

ProblemInstance build_example2(int n_y, const BenchmarkOptions& options) {
  if (n_y < 1) throw std::invalid_argument("N_Y must be at least 1");
  check_benchmark(options);
  const bool fix_left = clamped(options);
  const int n_x = 2 * n_y;
  const int n_z = n_y;
  const double h = options.length / n_x;
  // x: length, y: depth, z: height.
  const StructuredMesh mesh(n_x, n_y, n_z, h, h, h);

  DofMap dofs(mesh.node_count(), 3);
  if (fix_left) {
    for (int k = 0; k <= n_z; ++k) {
      for (int j = 0; j <= n_y; ++j) dofs.fix_node(mesh.node(0, j, k));
    }
  }
  dofs.finalize();

  std::vector<std::size_t> candidates;
  for (int j = 0; j <= n_y; ++j) {
    for (int i = fix_left ? 1 : 0; i <= n_x; ++i) candidates.push_back(mesh.node(i, j, 0));
  }

  ProblemInstance prob;
  prob.K = dofs.restrict_matrix(assemble_h8(mesh, options.young, options.poisson));
  prob.p = dofs.restrict_vector(top_traction_load(mesh, -options.traction, 2));
  prob.contact = contact_frames(mesh, dofs, candidates, Plane{{0.0, 0.0, 1.0}, -options.gap});
  prob.mu = options.mu;
  prob.info = ProblemInfo{"example2", n_x, n_y, n_z, options.young, options.poisson,
                          options.traction, options.gap, options.bc, n_x * h, n_y * h, n_z * h};
  return prob;
}

}  // namespace pdcontact::fem
