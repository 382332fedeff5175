#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pdcontact/cones.hpp"
#include "pdcontact/oracle.hpp"
#include "pdcontact/pdsolver.hpp"
#include "pdcontact/residuals.hpp"
#include "test_support.hpp"

using namespace pdcontact;
using namespace pdcontact::solver;

namespace {

// One planar node on the dofs (x, y): tangent e_x, normal e_y, K = I, g = 0.
ProblemInstance single_node(double px, double py, double mu) {
  ProblemInstance p;
  p.K = SparseMatrix::identity(2);
  p.p = {px, py};
  p.contact.m = 1;
  p.contact.c = 1;
  p.contact.Tn = SparseMatrix::from_triplets(2, 1, std::vector<Triplet>{{1, 0, 1.0}});
  p.contact.Tt = SparseMatrix::from_triplets(2, 1, std::vector<Triplet>{{0, 0, 1.0}});
  p.contact.g = {0.0};
  p.mu = mu;
  return p;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SolverConfig tight() {
  SolverConfig cfg;
  cfg.pcg_tol = 1e-13;
  cfg.eps = 1e-13;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.alpha0 = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.theta_fixed = 1.5;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.max_outer = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("prox of the quadratic energy matches a dense solve") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd K = testing::random_spd(12, rng);
    const Eigen::VectorXd u = testing::random_matrix(12, 1, rng);
    const Eigen::VectorXd p = testing::random_matrix(12, 1, rng);
    const double beta = 0.3 + trial;
    const Eigen::MatrixXd A = beta * K + Eigen::MatrixXd::Identity(12, 12);
    const Eigen::VectorXd want = A.ldlt().solve(u + beta * p);
    ProxInfo info;
    const Vector got = prox_pi(testing::stdvec(u), beta, testing::sparse(K), testing::stdvec(p),
                               Vector(12, 0.0), tight(), &info);
    CHECK(info.converged);
    CHECK((testing::vec(got) - want).cwiseAbs().maxCoeff() <= 1e-10);
    // Warm start at the answer needs no iterations.
    ProxInfo again;
    prox_pi(testing::stdvec(u), beta, testing::sparse(K), testing::stdvec(p), got, tight(), &again);
    CHECK(again.iterations <= 1);
  }
  const Vector u{1.0, 2.0};
  const Vector got = prox_pi(u, 1.0, SparseMatrix::identity(2), Vector{0.0, 0.0}, {}, tight());
  CHECK(got[0] == doctest::Approx(0.5));
  CHECK(got[1] == doctest::Approx(1.0));
  CHECK_THROWS(prox_pi(u, 0.0, SparseMatrix::identity(2), Vector{0.0, 0.0}, {}, tight()));
}

TEST_CASE("spectral estimates") {
  const ProblemInstance p = single_node(0.0, 0.0, 0.5);
  const SpectralEstimates s = estimate_spectrum(p);
  CHECK(s.sigma_T == doctest::Approx(1.0));
  CHECK(s.mu_pi == doctest::Approx(1.0));

  std::mt19937_64 rng(3);
  const ProblemInstance q = testing::random_instance({3, 2, 2, 0.5, 1.0, true}, rng);
  const SpectralEstimates e = estimate_spectrum(q);
  // Rotated orthonormal frames on disjoint dofs: T has orthonormal columns.
  CHECK(e.sigma_T == doctest::Approx(1.0).epsilon(1e-8));
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(testing::dense(q.K)).eigenvalues();
  CHECK(e.mu_pi == doctest::Approx(ev(0)).epsilon(1e-6));
}

TEST_CASE("fixed-step iteration: hand cases") {
  const SolverConfig cfg = tight();
  {
    const ProblemInstance p = single_node(0.0, 0.0, 0.5);
    const Solution s = pd_fixed_step(p, p.contact.g, 1.0, 1.0, 1.0, cfg);
    CHECK(s.converged);
    CHECK(max_abs_diff(s.du, {0.0, 0.0}) == 0.0);
    CHECK(max_abs_diff(s.r, {0.0, 0.0}) == 0.0);
  }
  {
    // A pure normal push is carried entirely by the obstacle.
    const ProblemInstance p = single_node(0.0, 0.7, 0.5);
    const Solution s = pd_fixed_step(p, p.contact.g, 1.0, 1.0, 1.0, cfg);
    CHECK(s.converged);
    CHECK(max_abs_diff(s.du, {0.0, 0.0}) <= 1e-10);
    CHECK(max_abs_diff(s.r, {-0.7, 0.0}) <= 1e-10);
  }
  {
    // Slip: with the friction bound frozen at g + mu |0.5| the slip solution
    // is reproduced.
    const ProblemInstance p = single_node(1.0, 1.0, 0.5);
    const Vector gt{0.25};
    const Solution s = pd_fixed_step(p, gt, 1.0, 1.0, 1.0, cfg);
    CHECK(s.converged);
    CHECK(max_abs_diff(s.du, {0.5, 0.0}) <= 1e-9);
    CHECK(max_abs_diff(s.r, {-1.0, -0.5}) <= 1e-9);
    const auto fb = verify::fixed_bound_residuals(p, gt, s.du, s.r);
    CHECK(fb.resid_eq <= 1e-9);
    CHECK(fb.cone_violation == 0.0);
  }
  const ProblemInstance p = single_node(1.0, 1.0, 0.5);
  CHECK_THROWS(pd_fixed_step(p, p.contact.g, 0.0, 1.0, 1.0, cfg));
  CHECK_THROWS(pd_fixed_step(p, p.contact.g, 1.0, 1.0, 1.5, cfg));
}

// The shrinking primal step ends the iteration a little before the fixed point.
TEST_CASE("accelerated iteration: hand cases") {
  const SolverConfig cfg = tight();
  {
    // Load pulls away from the obstacle: no contact, du = K^{-1} p.
    const ProblemInstance p = single_node(0.3, -1.0, 0.5);
    const Solution s = pd_accelerated(p, cfg);
    CHECK(s.converged);
    CHECK(s.status == SolveStatus::converged);
    CHECK(max_abs_diff(s.du, {0.3, -1.0}) <= 1e-8);
    CHECK(max_abs_diff(s.r, {0.0, 0.0}) <= 1e-8);
  }
  {
    const ProblemInstance p = single_node(0.3, 1.0, 0.5);
    const Solution s = pd_accelerated(p, cfg);
    CHECK(s.converged);
    CHECK(max_abs_diff(s.du, {0.0, 0.0}) <= 1e-8);
    CHECK(max_abs_diff(s.r, {-1.0, -0.3}) <= 1e-8);
    const auto rep = verify::residual_report(p, s.du, s.r);
    CHECK(rep.states[0] == verify::NodeState::stick);
  }
  {
    const ProblemInstance p = single_node(1.0, 1.0, 0.5);
    const Solution s = pd_accelerated(p, cfg);
    CHECK(s.converged);
    CHECK(max_abs_diff(s.du, {0.5, 0.0}) <= 1e-8);
    CHECK(max_abs_diff(s.r, {-1.0, -0.5}) <= 1e-8);
    const auto rep = verify::residual_report(p, s.du, s.r);
    CHECK(rep.states[0] == verify::NodeState::slip);
    CHECK(rep.resid_eq <= 1e-8);
    CHECK(rep.resid_compl <= 1e-8);
    CHECK(rep.resid_pen <= 1e-8);
  }
}

TEST_CASE("iteration cap reports the last iterate") {
  SolverConfig cfg = tight();
  cfg.max_outer = 3;
  const ProblemInstance p = single_node(1.0, 1.0, 0.5);
  const Solution s = pd_accelerated(p, cfg);
  CHECK_FALSE(s.converged);
  CHECK(s.status == SolveStatus::iteration_cap);
  CHECK(s.iterations == 3);
  CHECK(s.du.size() == 2);
  CHECK(std::string(to_string(s.status)) == "iteration_cap");
}

TEST_CASE("step-size invariants along the accelerated iteration") {
  std::mt19937_64 rng(19);
  for (int m : {1, 2}) {
    const ProblemInstance p = testing::random_instance({4, m, 3, 0.6, 1.0, true}, rng);
    const Solution s = pd_accelerated(p, tight());
    REQUIRE(s.converged);
    REQUIRE(s.history.size() == s.iterations);
    const double ab0 = s.history.front().alpha * s.history.front().beta;
    CHECK(ab0 * s.spectral.sigma_T * s.spectral.sigma_T == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 0; k < s.history.size(); ++k) {
      const IterationRecord& h = s.history[k];
      CHECK(std::abs(h.alpha * h.beta - ab0) <= 1e-12 * ab0);
      CHECK(h.theta > 0.0);
      CHECK(h.theta <= 1.0);
      CHECK(h.dual_in_cone);
      if (k > 0) CHECK(h.beta <= s.history[k - 1].beta);
    }
    for (std::size_t j = 0; j < p.contact.c; ++j) {
      const std::size_t b = p.contact.block_size();
      ReactionPoint rj;
      rj.m = m;
      rj.normal = s.r[b * j];
      for (int a = 0; a < m; ++a) rj.tangential[std::size_t(a)] = s.r[b * j + 1 + std::size_t(a)];
      CHECK(in_friction_cone(rj, p.mu, 0.0));
    }
  }
}

TEST_CASE("accelerated solutions agree with the enumeration oracle") {
  std::mt19937_64 rng(101);
  int compared = 0;
  for (int trial = 0; trial < 30 && compared < 10; ++trial) {
    const std::size_t c = 1 + std::size_t(trial % 3);
    const ProblemInstance p = testing::random_instance({c, 1, 2, 0.5, 1.0, true}, rng);
    const auto oracle = verify::oracle_enumerate(p);
    if (!oracle.unique()) continue;
    const Solution s = pd_accelerated(p, tight());
    REQUIRE(s.converged);
    CHECK(max_abs_diff(s.du, oracle.solutions[0].du) <= 1e-6);
    CHECK(max_abs_diff(s.r, oracle.solutions[0].r) <= 1e-6);
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("scaling K and p scales the reactions only") {
  std::mt19937_64 rng(23);
  const ProblemInstance p = testing::random_instance({3, 2, 2, 0.4, 1.0, true}, rng);
  ProblemInstance q = p;
  const double s = 7.5;
  q.K = testing::sparse(s * testing::dense(p.K));
  for (double& v : q.p) v *= s;
  const Solution a = pd_accelerated(p, tight());
  const Solution b = pd_accelerated(q, tight());
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(max_abs_diff(a.du, b.du) <= 1e-8);
  Vector ra = a.r;
  for (double& v : ra) v *= s;
  CHECK(max_abs_diff(ra, b.r) <= 1e-7);
}

TEST_CASE("load-step driver") {
  std::mt19937_64 rng(31);
  const ProblemInstance base = testing::random_instance({3, 1, 2, 0.5, 1.0, true}, rng);
  const SolverConfig cfg = tight();

  SUBCASE("one step from rest equals a single solve") {
    const std::vector<Vector> loads{base.p};
    const auto res = load_step_driver(base, loads, {}, cfg);
    REQUIRE(res.size() == 1);
    const Solution s = pd_accelerated(base, cfg);
    CHECK(max_abs_diff(res[0].du, s.du) <= 1e-10);
    CHECK(max_abs_diff(res[0].u, s.du) <= 1e-10);
    CHECK(max_abs_diff(res[0].r, s.r) <= 1e-10);
  }
  SUBCASE("repeating a load adds no displacement") {
    const std::vector<Vector> loads{base.p, base.p};
    const auto res = load_step_driver(base, loads, {}, cfg);
    REQUIRE(res.size() == 2);
    for (double v : res[1].du) CHECK(std::abs(v) <= 1e-9);
    CHECK(max_abs_diff(res[1].u, res[0].u) <= 1e-9);
  }
  SUBCASE("frictionless response is path independent") {
    ProblemInstance fl = base;
    fl.mu = 0.0;
    std::vector<Vector> ramp;
    for (int l = 1; l <= 4; ++l) {
      Vector pl = base.p;
      for (double& v : pl) v *= l / 4.0;
      ramp.push_back(pl);
    }
    const auto stepped = load_step_driver(fl, ramp, {}, cfg);
    const auto single = load_step_driver(fl, std::vector<Vector>{base.p}, {}, cfg);
    CHECK(max_abs_diff(stepped.back().u, single.back().u) <= 1e-6);
    CHECK(max_abs_diff(stepped.back().r, single.back().r) <= 1e-6);
  }
  SUBCASE("incremental problem shifts gaps and loads") {
    Vector u(base.dofs(), 0.01);
    const ProblemInstance inc = incremental_problem(base, {u, base.p});
    const Eigen::VectorXd want_p = testing::vec(base.p) - testing::dense(base.K) * testing::vec(u);
    CHECK((testing::vec(inc.p) - want_p).cwiseAbs().maxCoeff() <= 1e-14);
    const Eigen::VectorXd un = testing::dense(base.contact.Tn).transpose() * testing::vec(u);
    for (std::size_t j = 0; j < base.contact.c; ++j) {
      CHECK(inc.contact.g[j] == doctest::Approx(std::max(0.0, base.contact.g[j] - un(Eigen::Index(j)))));
    }
  }
  CHECK_THROWS(load_step_driver(base, std::vector<Vector>{}, {}, cfg));
  SolverConfig capped = cfg;
  capped.max_outer = 1;
  CHECK_THROWS_AS(load_step_driver(base, std::vector<Vector>{base.p}, {}, capped), LoadStepError);
}
