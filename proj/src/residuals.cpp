#include "pdcontact/residuals.hpp"

#include <algorithm>
#include <cmath>

#include "pdcontact/cones.hpp"

namespace pdcontact::verify {

const char* to_string(NodeState s) {
  switch (s) {
    case NodeState::free: return "free";
    case NodeState::slip: return "slip";
    case NodeState::stick: return "stick";
  }
  return "?";
}

void split_reactions(const ContactGeometry& contact, std::span<const double> r, Vector& r_n,
                     Vector& r_t) {
  const std::size_t m = static_cast<std::size_t>(contact.m);
  require_size(r.size(), (1 + m) * contact.c, "reaction vector");
  r_n.resize(contact.c);
  r_t.resize(m * contact.c);
  for (std::size_t j = 0; j < contact.c; ++j) {
    r_n[j] = r[(1 + m) * j];
    for (std::size_t a = 0; a < m; ++a) r_t[m * j + a] = r[(1 + m) * j + 1 + a];
  }
}

double equilibrium_residual(const ProblemInstance& problem, std::span<const double> du,
                            std::span<const double> r) {
  require_size(du.size(), problem.dofs(), "displacement increment");
  Vector r_n, r_t;
  split_reactions(problem.contact, r, r_n, r_t);
  Vector res = spmv(problem.K, du);
  const Vector fn = spmv(problem.contact.Tn, r_n);
  const Vector ft = spmv(problem.contact.Tt, r_t);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] -= problem.p[i] + fn[i] + ft[i];
  return norm2(res);
}

namespace {

double cone_violation_of(const ContactGeometry& contact, std::span<const double> r, double mu) {
  const std::size_t b = contact.block_size();
  double worst = 0.0;
  for (std::size_t j = 0; j < contact.c; ++j) {
    const double v = tangential_norm(r.subspan(b * j + 1, b - 1)) + mu * r[b * j];
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

ResidualReport residual_report(const ProblemInstance& problem, std::span<const double> du,
                               std::span<const double> r, double tol_factor) {
  const auto& ct = problem.contact;
  const std::size_t m = static_cast<std::size_t>(ct.m);
  const std::size_t b = ct.block_size();
  ResidualReport rep;
  rep.resid_eq = equilibrium_residual(problem, du, r);

  const Vector un = spmv_transpose(ct.Tn, du);  // tn_j^T du
  const Vector ut = spmv_transpose(ct.Tt, du);  // Tt_j^T du
  const double tol = tol_factor * std::max(1.0, norm_inf(du));

  double compl_sum = 0.0;
  double pen_sq = 0.0;
  rep.states.resize(ct.c);
  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t j = 0; j < ct.c; ++j) {
    const std::span<const double> slip(ut.data() + m * j, m);
    const double slip_norm = tangential_norm(slip);
    const double r_n = r[b * j];
    const std::span<const double> r_t = r.subspan(b * j + 1, m);
    double term = (-ct.g[j] - problem.mu * slip_norm + un[j]) * r_n;
    for (std::size_t a = 0; a < m; ++a) term += slip[a] * r_t[a];
    compl_sum += term;

    const double gap = ct.g[j] - un[j];
    if (gap < 0.0) pen_sq += gap * gap;

    const double r_norm = std::hypot(r_n, tangential_norm(r_t));
    NodeState state = NodeState::slip;
    if (r_norm <= tol) {
      state = NodeState::free;
    } else if (slip_norm <= tol) {
      state = NodeState::stick;
    }
    rep.states[j] = state;
    ++counts[static_cast<int>(state)];
  }
  rep.resid_compl = std::abs(compl_sum);
  rep.resid_pen = std::sqrt(pen_sq);
  rep.cone_violation = cone_violation_of(ct, r, problem.mu);
  if (ct.c == 0) {
    rep.fractions = {1.0, 0.0, 0.0};
  } else {
    const double c = static_cast<double>(ct.c);
    rep.fractions = {counts[0] / c, counts[1] / c, counts[2] / c};
  }
  return rep;
}

FixedBoundResiduals fixed_bound_residuals(const ProblemInstance& problem,
                                          std::span<const double> g_tilde,
                                          std::span<const double> du, std::span<const double> r) {
  const auto& ct = problem.contact;
  require_size(g_tilde.size(), ct.c, "fixed gap bounds");
  const std::size_t m = static_cast<std::size_t>(ct.m);
  const std::size_t b = ct.block_size();
  FixedBoundResiduals out;
  out.resid_eq = equilibrium_residual(problem, du, r);
  const Vector un = spmv_transpose(ct.Tn, du);
  const Vector ut = spmv_transpose(ct.Tt, du);
  double sum = 0.0;
  for (std::size_t j = 0; j < ct.c; ++j) {
    const double v_n = -g_tilde[j] + un[j];
    const std::span<const double> v_t(ut.data() + m * j, m);
    double term = v_n * r[b * j];
    for (std::size_t a = 0; a < m; ++a) term += v_t[a] * r[b * j + 1 + a];
    sum += term;
    out.dual_violation = std::max(out.dual_violation, v_n + problem.mu * tangential_norm(v_t));
  }
  out.resid_compl = std::abs(sum);
  out.cone_violation = cone_violation_of(ct, r, problem.mu);
  return out;
}

}  // namespace pdcontact::verify
