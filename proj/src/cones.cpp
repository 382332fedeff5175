#include "pdcontact/cones.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdcontact {

namespace {

void check_tangent(std::size_t m) {
  if (m != 1 && m != 2) throw std::invalid_argument("tangential dimension must be 1 or 2");
}

}  // namespace

double tangential_norm(std::span<const double> t) {
  if (t.size() == 1) return std::abs(t[0]);
  double acc = 0.0;
  for (double v : t) acc += v * v;
  return std::sqrt(acc);
}

void project_friction_cone_inplace(std::span<double> block, double mu) {
  assert(!block.empty());
  const double s_n = block[0];
  const std::span<double> s_t = block.subspan(1);
  const double t_norm = tangential_norm(s_t);

  const double lambda1 = -mu * s_n - t_norm;
  if (lambda1 >= 0.0) return;

  const double lambda2 = -s_n + mu * t_norm;
  if (lambda2 <= 0.0) {
    block[0] = 0.0;
    for (double& v : s_t) v = 0.0;
    return;
  }
  // lambda1 < 0 with s_t = 0 forces s_n > 0 and hence lambda2 < 0.
  assert(t_norm > 0.0);

  const double scale = lambda2 / (1.0 + mu * mu);
  const double t_scale = scale * mu / t_norm;
  for (double& v : s_t) v *= t_scale;
  double r_n = -scale;
  const double r_t_norm = tangential_norm(s_t);
  while (-mu * r_n - r_t_norm < 0.0) {
    r_n = std::nextafter(r_n, -std::numeric_limits<double>::infinity());
  }
  block[0] = r_n;
}

ReactionPoint project_friction_cone(double s_n, std::span<const double> s_t, double mu) {
  check_tangent(s_t.size());
  if (!(mu >= 0.0)) throw std::invalid_argument("friction coefficient must be non-negative");
  std::array<double, 3> block{s_n, s_t[0], s_t.size() > 1 ? s_t[1] : 0.0};
  project_friction_cone_inplace(std::span<double>(block.data(), 1 + s_t.size()), mu);
  ReactionPoint r;
  r.m = static_cast<int>(s_t.size());
  r.normal = block[0];
  r.tangential = {block[1], s_t.size() > 1 ? block[2] : 0.0};
  return r;
}

ReactionPoint project_soc(double x0, std::span<const double> x1) {
  check_tangent(x1.size());
  ReactionPoint out;
  out.m = static_cast<int>(x1.size());
  const double n1 = tangential_norm(x1);
  if (n1 <= x0) {
    out.normal = x0;
    for (std::size_t i = 0; i < x1.size(); ++i) out.tangential[i] = x1[i];
    return out;
  }
  if (n1 <= -x0) return out;
  const double half = 0.5 * (x0 + n1);
  out.normal = half;
  for (std::size_t i = 0; i < x1.size(); ++i) out.tangential[i] = half * x1[i] / n1;
  return out;
}

bool in_friction_cone(const ReactionPoint& r, double mu, double tol) {
  return -mu * r.normal + tol - tangential_norm(r.tangent()) >= 0.0;
}

bool in_friction_cone(std::span<const double> block, double mu, double tol) {
  return -mu * block[0] + tol - tangential_norm(block.subspan(1)) >= 0.0;
}

bool in_dual_cone(double v_n, std::span<const double> v_t, double mu, double tol) {
  return -v_n + tol >= mu * tangential_norm(v_t);
}

double soc_violation(double x0, std::span<const double> x1) {
  const double gap = tangential_norm(x1) - x0;
  return gap > 0.0 ? gap : 0.0;
}

}  // namespace pdcontact
