#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "pdcontact/cones.hpp"

using namespace pdcontact;

namespace {

struct Point {
  double n;
  std::array<double, 2> t;
  int m;
  std::span<const double> tan() const { return {t.data(), std::size_t(m)}; }
};

double dist(const Point& s, const ReactionPoint& r) {
  double acc = (s.n - r.normal) * (s.n - r.normal);
  for (int a = 0; a < s.m; ++a) acc += (s.t[a] - r.tangential[a]) * (s.t[a] - r.tangential[a]);
  return std::sqrt(acc);
}

// Smallest distance from s to a polar grid of F truncated at radius `reach`.
// Returns the grid minimum; `h` receives a bound on the grid's covering radius.
double grid_distance(const Point& s, double mu, double reach, int nr, int nt, int nphi, double& h) {
  double best = std::hypot(s.n, std::hypot(s.t[0], s.t[1]));  // origin
  const double dr = reach / nr;
  for (int i = 1; i <= nr; ++i) {
    const double depth = i * dr;  // -r_n
    for (int k = 0; k <= nt; ++k) {
      const double rad = mu * depth * k / nt;  // ||r_t||
      const int nph = s.m == 1 ? 2 : nphi;
      for (int q = 0; q < nph; ++q) {
        double t0, t1 = 0.0;
        if (s.m == 1) {
          t0 = q == 0 ? rad : -rad;
        } else {
          const double phi = 2.0 * M_PI * q / nphi;
          t0 = rad * std::cos(phi);
          t1 = rad * std::sin(phi);
        }
        const double d2 = (s.n + depth) * (s.n + depth) + (s.t[0] - t0) * (s.t[0] - t0) +
                          (s.t[1] - t1) * (s.t[1] - t1);
        best = std::min(best, std::sqrt(d2));
      }
    }
  }
  const double max_rad = mu * reach;
  h = dr + max_rad / nt + (s.m == 2 ? max_rad * M_PI / nphi : 0.0);
  return best;
}

}  // namespace

TEST_CASE("friction cone projection: hand cases") {
  const std::array<double, 2> t1{0.5, 0.0};
  auto r = project_friction_cone(-2.0, t1, 0.5);
  CHECK(r.normal == -2.0);
  CHECK(r.tangential[0] == 0.5);

  const std::array<double, 2> t2{0.3, 0.4};
  r = project_friction_cone(1.0, t2, 0.5);
  CHECK(r.normal == 0.0);
  CHECK(r.tangential[0] == 0.0);
  CHECK(r.tangential[1] == 0.0);

  const std::array<double, 2> t3{1.0, 0.0};
  r = project_friction_cone(0.0, t3, 0.5);
  CHECK(r.normal == doctest::Approx(-0.4).epsilon(1e-15));
  CHECK(r.tangential[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(r.tangential[1] == 0.0);

  // Planar: ||s_t|| is |s_t|.
  const std::array<double, 1> t4{-1.0};
  r = project_friction_cone(0.0, t4, 0.5);
  CHECK(r.m == 1);
  CHECK(r.normal == doctest::Approx(-0.4));
  CHECK(r.tangential[0] == doctest::Approx(-0.2));

  CHECK_THROWS(project_friction_cone(0.0, std::span<const double>(), 0.5));
  CHECK_THROWS(project_friction_cone(0.0, t3, -0.1));
}

TEST_CASE("second-order cone projection: hand cases") {
  const std::array<double, 2> a{1.0, 0.0};
  auto r = project_soc(2.0, a);
  CHECK(r.normal == 2.0);
  CHECK(r.tangential[0] == 1.0);
  r = project_soc(-2.0, a);
  CHECK(r.normal == 0.0);
  CHECK(r.tangential[0] == 0.0);
  const std::array<double, 2> b{2.0, 0.0};
  r = project_soc(0.0, b);
  CHECK(r.normal == doctest::Approx(1.0));
  CHECK(r.tangential[0] == doctest::Approx(1.0));
}

TEST_CASE("membership predicates") {
  const std::array<double, 2> in{0.4, 0.0}, edge{0.5, 0.0}, out{0.6, 0.0};
  CHECK(in_friction_cone(ReactionPoint{-1.0, in, 2}, 0.5));
  CHECK(in_friction_cone(ReactionPoint{-1.0, edge, 2}, 0.5));
  CHECK_FALSE(in_friction_cone(ReactionPoint{-1.0, out, 2}, 0.5));
  CHECK(in_friction_cone(ReactionPoint{-1.0, out, 2}, 0.5, 0.1 + 1e-12));

  const std::array<double, 2> v{1.0, 0.0};
  CHECK(in_dual_cone(-0.5, v, 0.5));
  CHECK_FALSE(in_dual_cone(-0.4, v, 0.5));
  CHECK(soc_violation(1.0, std::span<const double>(v)) == 0.0);
  CHECK(soc_violation(0.25, std::span<const double>(v)) == 0.75);
}

TEST_CASE("projection properties on random points") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double mu : {0.25, 0.5, 1.0, 1.5}) {
    for (int m : {1, 2}) {
      for (int i = 0; i < 2000; ++i) {
        Point s{u(rng), {u(rng), m == 2 ? u(rng) : 0.0}, m};
        Point s2{u(rng), {u(rng), m == 2 ? u(rng) : 0.0}, m};
        const ReactionPoint r = project_friction_cone(s.n, s.tan(), mu);
        const ReactionPoint r2 = project_friction_cone(s2.n, s2.tan(), mu);

        CHECK(in_friction_cone(r, mu, 0.0));
        const ReactionPoint rr = project_friction_cone(r.normal, r.tangent(), mu);
        CHECK(rr.normal == r.normal);
        CHECK(rr.tangential == r.tangential);

        // Moreau: q = s - r is orthogonal to r and lies in the polar cone.
        const double qn = s.n - r.normal;
        std::array<double, 2> qt{s.t[0] - r.tangential[0], s.t[1] - r.tangential[1]};
        double inner = qn * r.normal;
        for (int a = 0; a < m; ++a) inner += qt[a] * r.tangential[a];
        const double s2norm = s.n * s.n + s.t[0] * s.t[0] + s.t[1] * s.t[1];
        CHECK(std::abs(inner) <= 1e-12 * (1.0 + s2norm));
        // -q in F*  <=>  q_n >= mu ||q_t||
        CHECK(in_dual_cone(-qn, std::span<const double>(qt.data(), std::size_t(m)), mu, 1e-12));

        // Non-expansive.
        const Point diff{r.normal, {r.tangential[0], r.tangential[1]}, m};
        const double lhs = dist(diff, r2);
        const double rhs = std::sqrt((s.n - s2.n) * (s.n - s2.n) + (s.t[0] - s2.t[0]) * (s.t[0] - s2.t[0]) +
                                     (s.t[1] - s2.t[1]) * (s.t[1] - s2.t[1]));
        CHECK(lhs <= rhs + 1e-12);
      }
    }
  }
}

TEST_CASE("projection is the nearest point of a fine grid of the cone") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double mu : {0.25, 0.5, 1.0, 1.5}) {
    for (int m : {1, 2}) {
      const int samples = m == 1 ? 200 : 40;
      for (int i = 0; i < samples; ++i) {
        const Point s{u(rng), {u(rng), m == 2 ? u(rng) : 0.0}, m};
        const ReactionPoint r = project_friction_cone(s.n, s.tan(), mu);
        const double reach = std::hypot(s.n, std::hypot(s.t[0], s.t[1])) + 1e-9;
        double h = 0.0;
        const double grid = m == 1 ? grid_distance(s, mu, reach, 400, 400, 0, h)
                                   : grid_distance(s, mu, reach, 60, 60, 120, h);
        const double mine = dist(s, r);
        CHECK(mine <= grid + 1e-12);  // never beaten by a feasible grid point
        CHECK(grid - mine <= h);      // and the grid gets within its resolution
      }
    }
  }
}

TEST_CASE("mu = 1 friction cone projection agrees with the second-order cone formula") {
  // F(1) = { -r_n >= ||r_t|| } is L under x0 = -r_n.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    const std::array<double, 2> x1{u(rng), u(rng)};
    const double x0 = u(rng);
    const ReactionPoint f = project_friction_cone(-x0, x1, 1.0);
    const ReactionPoint l = project_soc(x0, x1);
    CHECK(std::abs(-f.normal - l.normal) <= 1e-14);
    CHECK(std::abs(f.tangential[0] - l.tangential[0]) <= 1e-14);
    CHECK(std::abs(f.tangential[1] - l.tangential[1]) <= 1e-14);
  }
}

TEST_CASE("frictionless limit projects onto the negative normal half-line") {
  const std::array<double, 2> t{0.7, -0.2};
  ReactionPoint r = project_friction_cone(-1.0, t, 0.0);
  CHECK(r.normal == -1.0);
  CHECK(r.tangential[0] == 0.0);
  CHECK(r.tangential[1] == 0.0);
  r = project_friction_cone(1.0, t, 0.0);
  CHECK(r.normal == 0.0);
}
