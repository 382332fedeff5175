#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>

#include "pdcontact/fem.hpp"
#include "pdcontact/linalg.hpp"
#include "test_support.hpp"

using namespace pdcontact;
using namespace pdcontact::fem;

namespace {

// Plane-stress stress of a constant strain (exx, eyy, gxy).
Eigen::Matrix2d plane_stress(double E, double nu, double exx, double eyy, double gxy) {
  const double f = E / (1.0 - nu * nu);
  Eigen::Matrix2d s;
  s(0, 0) = f * (exx + nu * eyy);
  s(1, 1) = f * (eyy + nu * exx);
  s(0, 1) = s(1, 0) = f * 0.5 * (1.0 - nu) * gxy;
  return s;
}

Eigen::Matrix3d solid_stress(double E, double nu, const Eigen::Matrix3d& grad) {
  const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double g = E / (2.0 * (1.0 + nu));
  const Eigen::Matrix3d eps = 0.5 * (grad + grad.transpose());
  return lambda * eps.trace() * Eigen::Matrix3d::Identity() + 2.0 * g * eps;
}

template <std::size_t N>
Eigen::MatrixXd as_matrix(const std::array<double, N>& a, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = a[std::size_t(i * n + j)];
  }
  return m;
}

int near_zero_eigenvalues(const Eigen::MatrixXd& k) {
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues();
  const double big = ev.cwiseAbs().maxCoeff();
  int count = 0;
  for (int i = 0; i < ev.size(); ++i) count += std::abs(ev(i)) <= 1e-12 * big;
  return count;
}

}  // namespace

TEST_CASE("structured mesh numbering") {
  const StructuredMesh m(3, 2, 0.5, 0.25);
  CHECK(m.node_count() == 12);
  CHECK(m.element_count() == 6);
  CHECK(m.node(1, 2) == 9);
  const auto xy = m.coordinates(m.node(3, 2));
  CHECK(xy[0] == doctest::Approx(1.5));
  CHECK(xy[1] == doctest::Approx(0.5));
  const auto e = m.element_nodes(1, 0);
  CHECK(e == std::vector<std::size_t>{1, 2, 6, 5});

  const StructuredMesh b(2, 1, 1, 1.0, 1.0, 1.0);
  CHECK(b.node_count() == 12);
  CHECK(b.element_nodes(0, 0, 0) == std::vector<std::size_t>{0, 1, 4, 3, 6, 7, 10, 9});
  CHECK_THROWS(StructuredMesh(0, 1, 1.0, 1.0));
  CHECK_THROWS(StructuredMesh(1, 1, -1.0, 1.0));
}

TEST_CASE("dof map restriction and expansion") {
  DofMap dofs(3, 2);
  dofs.fix_node(1);
  dofs.finalize();
  CHECK(dofs.free_dofs() == 4);
  CHECK(dofs.dof(1, 0) == -1);
  CHECK(dofs.dof(2, 1) == 3);
  const Vector full{1, 2, 3, 4, 5, 6};
  const Vector red = dofs.restrict_vector(full);
  CHECK(red == Vector{1, 2, 5, 6});
  CHECK(dofs.expand_vector(red) == Vector{1, 2, 0, 0, 5, 6});
  const SparseMatrix k = dofs.restrict_matrix(SparseMatrix::identity(6));
  CHECK(k == SparseMatrix::identity(4));
}

TEST_CASE("Q4 single-element patch test") {
  const double hx = 0.7, hy = 0.4, E = 1.0, nu = 0.3;
  const Eigen::MatrixXd ke = as_matrix(q4_element_stiffness(hx, hy, E, nu), 8);
  CHECK((ke - ke.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(near_zero_eigenvalues(ke) == 3);

  const StructuredMesh mesh(1, 1, hx, hy);
  const auto nodes = mesh.element_nodes(0, 0);
  // u = a + A x with a general linear field.
  const double a0 = 0.1, a1 = -0.2;
  Eigen::Matrix2d grad;
  grad << 0.3, -0.15, 0.25, -0.05;
  Eigen::VectorXd u(8);
  for (int a = 0; a < 4; ++a) {
    const auto x = mesh.coordinates(nodes[std::size_t(a)]);
    u(2 * a) = a0 + grad(0, 0) * x[0] + grad(0, 1) * x[1];
    u(2 * a + 1) = a1 + grad(1, 0) * x[0] + grad(1, 1) * x[1];
  }
  const Eigen::Matrix2d sigma = plane_stress(E, nu, grad(0, 0), grad(1, 1), grad(0, 1) + grad(1, 0));
  // Each corner collects half of the traction resultant of its two edges.
  Eigen::VectorXd expected(8);
  for (int a = 0; a < 4; ++a) {
    const auto x = mesh.coordinates(nodes[std::size_t(a)]);
    const Eigen::Vector2d nx(x[0] == 0.0 ? -1.0 : 1.0, 0.0);
    const Eigen::Vector2d ny(0.0, x[1] == 0.0 ? -1.0 : 1.0);
    expected.segment<2>(2 * a) = 0.5 * hy * sigma * nx + 0.5 * hx * sigma * ny;
  }
  CHECK((ke * u - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("H8 single-element patch test") {
  const double hx = 0.5, hy = 0.8, hz = 0.3, E = 2.0, nu = 0.25;
  const Eigen::MatrixXd ke = as_matrix(h8_element_stiffness(hx, hy, hz, E, nu), 24);
  CHECK((ke - ke.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(near_zero_eigenvalues(ke) == 6);

  const StructuredMesh mesh(1, 1, 1, hx, hy, hz);
  const auto nodes = mesh.element_nodes(0, 0, 0);
  Eigen::Matrix3d grad;
  grad << 0.2, -0.1, 0.05, 0.3, -0.25, 0.1, -0.15, 0.07, 0.4;
  const Eigen::Vector3d shift(0.01, -0.02, 0.03);
  Eigen::VectorXd u(24);
  for (int a = 0; a < 8; ++a) {
    const auto c = mesh.coordinates(nodes[std::size_t(a)]);
    const Eigen::Vector3d x(c[0], c[1], c[2]);
    u.segment<3>(3 * a) = shift + grad * x;
  }
  const Eigen::Matrix3d sigma = solid_stress(E, nu, grad);
  const double area[3] = {hy * hz, hx * hz, hx * hy};
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(24);
  for (int a = 0; a < 8; ++a) {
    const auto c = mesh.coordinates(nodes[std::size_t(a)]);
    for (int axis = 0; axis < 3; ++axis) {
      Eigen::Vector3d n = Eigen::Vector3d::Zero();
      n(axis) = c[std::size_t(axis)] == 0.0 ? -1.0 : 1.0;
      expected.segment<3>(3 * a) += 0.25 * area[axis] * sigma * n;
    }
  }
  CHECK((ke * u - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("assembled stiffness: symmetry and rigid modes") {
  const StructuredMesh m2(4, 3, 0.25, 0.25);
  const SparseMatrix k2 = assemble_q4_plane_stress(m2, 1.0, 0.3);
  CHECK(k2.structurally_symmetric());
  CHECK(k2.symmetry_defect() <= 1e-14);
  CHECK(near_zero_eigenvalues(testing::dense(k2)) == 3);

  const StructuredMesh m3(2, 2, 2, 0.5, 0.5, 0.5);
  const SparseMatrix k3 = assemble_h8(m3, 1.0, 0.3);
  CHECK(k3.structurally_symmetric());
  CHECK(k3.symmetry_defect() <= 1e-14);
  CHECK(near_zero_eigenvalues(testing::dense(k3)) == 6);

  CHECK_THROWS(assemble_h8(m2, 1.0, 0.3));
  CHECK_THROWS(assemble_q4_plane_stress(m3, 1.0, 0.3));
  CHECK_THROWS(q4_element_stiffness(1.0, 1.0, 1.0, 0.5));
  CHECK_THROWS(q4_element_stiffness(1.0, 1.0, -1.0, 0.3));
}

TEST_CASE("consistent traction loads sum to traction times area") {
  const StructuredMesh m2(10, 4, 0.1, 0.1);
  const Vector f2 = top_traction_load(m2, -0.01, 1);
  double fy = 0.0, fx = 0.0;
  for (std::size_t n = 0; n < m2.node_count(); ++n) {
    fx += f2[2 * n];
    fy += f2[2 * n + 1];
  }
  CHECK(fx == 0.0);
  CHECK(std::abs(fy - (-0.01 * 1.0)) <= 1e-12);
  // Interior top nodes carry h, corner nodes h/2.
  CHECK(f2[2 * m2.node(5, 4) + 1] == doctest::Approx(-0.01 * 0.1));
  CHECK(f2[2 * m2.node(0, 4) + 1] == doctest::Approx(-0.01 * 0.05));

  const StructuredMesh m3(4, 2, 2, 0.5, 0.5, 0.5);
  const Vector f3 = top_traction_load(m3, -5e-3, 2);
  double fz = 0.0;
  for (std::size_t n = 0; n < m3.node_count(); ++n) fz += f3[3 * n + 2];
  CHECK(std::abs(fz - (-5e-3 * 2.0 * 1.0)) <= 1e-12);
}

TEST_CASE("contact frames against flat obstacles") {
  const StructuredMesh m(2, 1, 1, 1.0, 1.0, 1.0);
  DofMap dofs(m.node_count(), 3);
  dofs.finalize();
  const std::vector<std::size_t> cand{m.node(0, 0, 0), m.node(2, 1, 0)};
  const ContactGeometry g = contact_frames(m, dofs, cand, Plane{{0.0, 0.0, 1.0}, -0.01});
  CHECK(g.c == 2);
  CHECK(g.m == 2);
  CHECK(g.g == Vector{0.01, 0.01});
  const Eigen::MatrixXd tn = testing::dense(g.Tn), tt = testing::dense(g.Tt);
  const auto z = dofs.dof(cand[0], 2);
  CHECK(tn(z, 0) == -1.0);
  CHECK(tn.col(0).norm() == 1.0);
  CHECK(tt(dofs.dof(cand[0], 0), 0) == 1.0);
  CHECK(tt(dofs.dof(cand[0], 1), 1) == 1.0);
  for (int j = 0; j < 2; ++j) {
    const Eigen::MatrixXd frame = tt.middleCols(2 * j, 2);
    CHECK((frame.transpose() * frame - Eigen::Matrix2d::Identity()).norm() == 0.0);
    CHECK((frame.transpose() * tn.col(j)).norm() == 0.0);
  }
  // Moving down by 0.004 closes the gap to 0.006.
  Vector du(dofs.free_dofs(), 0.0);
  du[std::size_t(z)] = -0.004;
  const Vector un = spmv_transpose(g.Tn, du);
  CHECK(g.g[0] - un[0] == doctest::Approx(0.006));

  CHECK_THROWS(contact_frames(m, dofs, cand, Plane{{0.0, 0.0, 1.0}, 0.5}));

  const StructuredMesh m2(2, 2, 1.0, 1.0);
  DofMap d2(m2.node_count(), 2);
  d2.finalize();
  const std::vector<std::size_t> c2{m2.node(1, 0)};
  const ContactGeometry g2 = contact_frames(m2, d2, c2, Plane{{0.0, 1.0, 0.0}, -0.02});
  CHECK(g2.m == 1);
  CHECK(g2.g[0] == doctest::Approx(0.02));
  CHECK(testing::dense(g2.Tn)(d2.dof(c2[0], 1), 0) == -1.0);
  CHECK(std::abs(testing::dense(g2.Tt)(d2.dof(c2[0], 0), 0)) == 1.0);
}

TEST_CASE("example 1 generator") {
  const ProblemInstance p = build_example1(4);
  CHECK(p.contact.c == 10);
  CHECK(p.dofs() == 2 * 11 * 5 - 2 * 5);
  CHECK(p.contact.m == 1);
  CHECK(p.mu == 0.5);
  for (double g : p.contact.g) CHECK(g == 0.01);
  CHECK(p.K.symmetry_defect() <= 1e-14);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(testing::dense(p.K)).eigenvalues()(0) > 0.0);
  CHECK(p.info.extent_x == doctest::Approx(1.0));
  CHECK(p.info.extent_y == doctest::Approx(0.4));

  const ProblemInstance p40 = build_example1(40);
  CHECK(p40.contact.c == 100);
  // Largest 2D size of the published runs.
  const ProblemInstance p104 = build_example1(104);
  CHECK(p104.dofs() == 54600);
  CHECK(p104.contact.c == 260);

  CHECK_THROWS(build_example1(3));
  BenchmarkOptions bad = example1_defaults();
  bad.gap = -1.0;
  CHECK_THROWS(build_example1(4, bad));
  bad = example1_defaults();
  bad.bc = "pinned";
  CHECK_THROWS(build_example1(4, bad));

  BenchmarkOptions free_bc = example1_defaults();
  free_bc.bc = "free";
  const ProblemInstance pf = build_example1(4, free_bc);
  CHECK(pf.dofs() == 2 * 11 * 5);
  CHECK(pf.contact.c == 11);
}

TEST_CASE("example 2 generator") {
  const ProblemInstance p = build_example2(10);
  CHECK(p.contact.c == 220);
  CHECK(p.contact.m == 2);
  for (double g : p.contact.g) CHECK(g == 0.005);
  CHECK(p.K.symmetry_defect() <= 1e-14);
  double total = std::accumulate(p.p.begin(), p.p.end(), 0.0);
  // Loads on the clamped face are dropped: the top face loses one column of
  // node shares, (N_Y + 1) nodes of which the two ends carry half.
  const double h = 0.1;
  const double dropped = -5e-3 * 0.25 * h * h * (2.0 * (10 - 1) + 2.0);
  CHECK(std::abs(total - (-5e-3 * 2.0 - dropped)) <= 1e-12);

  const ProblemInstance p1 = build_example2(1);
  CHECK(p1.contact.c == 2 * 2);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(testing::dense(p1.K)).eigenvalues()(0) > 0.0);
}

TEST_CASE("example 2 at the largest reported size" * doctest::timeout(120)) {
  const ProblemInstance p = build_example2(28);
  CHECK(p.dofs() == 141288);
  CHECK(p.contact.c == 1624);
}
