#include "pdcontact/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace pdcontact::verify {

const char* to_string(OracleState s) {
  switch (s) {
    case OracleState::free: return "free";
    case OracleState::stick: return "stick";
    case OracleState::slip_pos: return "slip+";
    case OracleState::slip_neg: return "slip-";
  }
  return "?";
}

bool oracle_eligible(const ProblemInstance& problem) {
  return problem.contact.m == 1 && problem.contact.c <= kOracleMaxNodes;
}

namespace {

Eigen::MatrixXd dense(const SparseMatrix& a) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()),
                                              static_cast<Eigen::Index>(a.cols()));
  for (const Triplet& t : a.to_triplets()) {
    out(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
  }
  return out;
}

}  // namespace

OracleResult oracle_enumerate(const ProblemInstance& problem, double tol) {
  validate(problem);
  if (problem.contact.m != 1) {
    throw std::invalid_argument("oracle: only planar problems (m = 1) can be enumerated");
  }
  if (problem.contact.c > kOracleMaxNodes) {
    throw std::invalid_argument("oracle: at most " + std::to_string(kOracleMaxNodes) +
                                " contact candidates supported");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("oracle: tol must be positive");

  using Eigen::Index;
  const auto& ct = problem.contact;
  const Index d = static_cast<Index>(problem.dofs());
  const Index c = static_cast<Index>(ct.c);
  const Index n = d + 2 * c;  // unknowns: du, r_n, r_t
  const double mu = problem.mu;

  const Eigen::MatrixXd K = dense(problem.K);
  const Eigen::MatrixXd Tn = dense(ct.Tn);
  const Eigen::MatrixXd Tt = dense(ct.Tt);
  const Eigen::Map<const Eigen::VectorXd> p(problem.p.data(), d);
  const Eigen::Map<const Eigen::VectorXd> g(ct.g.data(), c);

  OracleResult result;
  std::size_t combos = 1;
  for (Index j = 0; j < c; ++j) combos *= 4;
  result.combinations = combos;

  std::vector<OracleState> states(static_cast<std::size_t>(c));
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t rest = code;
    for (auto& s : states) {
      s = static_cast<OracleState>(rest % 4);
      rest /= 4;
    }

    // K du - Tn r_n - Tt r_t = p, then two rows per node.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    A.topLeftCorner(d, d) = K;
    A.block(0, d, d, c) = -Tn;
    A.block(0, d + c, d, c) = -Tt;
    rhs.head(d) = p;
    for (Index j = 0; j < c; ++j) {
      const Index r1 = d + 2 * j, r2 = r1 + 1;
      switch (states[static_cast<std::size_t>(j)]) {
        case OracleState::free:
          A(r1, d + j) = 1.0;
          A(r2, d + c + j) = 1.0;
          break;
        case OracleState::stick:
          A.row(r1).head(d) = Tn.col(j).transpose();
          rhs(r1) = g(j);
          A.row(r2).head(d) = Tt.col(j).transpose();
          break;
        case OracleState::slip_pos:
        case OracleState::slip_neg: {
          const double sign = states[static_cast<std::size_t>(j)] == OracleState::slip_pos ? 1.0 : -1.0;
          A.row(r1).head(d) = Tn.col(j).transpose();
          rhs(r1) = g(j);
          A(r2, d + c + j) = 1.0;
          A(r2, d + j) = -sign * mu;
          break;
        }
      }
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) {
      ++result.singular;
      continue;
    }
    const Eigen::VectorXd z = lu.solve(rhs);
    const double scale = std::max(1.0, z.lpNorm<Eigen::Infinity>());
    const double eps = tol * scale;
    if ((A * z - rhs).lpNorm<Eigen::Infinity>() > eps) {
      ++result.singular;
      continue;
    }

    const Eigen::VectorXd du = z.head(d);
    const Eigen::VectorXd rn = z.segment(d, c);
    const Eigen::VectorXd rt = z.segment(d + c, c);
    const Eigen::VectorXd gap = g - Tn.transpose() * du;
    const Eigen::VectorXd slip = Tt.transpose() * du;

    bool ok = true;
    for (Index j = 0; j < c && ok; ++j) {
      ok = gap(j) >= -eps && rn(j) <= eps;
      switch (states[static_cast<std::size_t>(j)]) {
        case OracleState::free: break;
        case OracleState::stick: ok = ok && std::abs(rt(j)) <= -mu * rn(j) + eps; break;
        case OracleState::slip_pos: ok = ok && slip(j) >= -eps; break;
        case OracleState::slip_neg: ok = ok && slip(j) <= eps; break;
      }
    }
    if (!ok) continue;

    OracleSolution sol;
    sol.du.assign(du.data(), du.data() + d);
    sol.r.resize(static_cast<std::size_t>(2 * c));
    for (Index j = 0; j < c; ++j) {
      sol.r[static_cast<std::size_t>(2 * j)] = rn(j);
      sol.r[static_cast<std::size_t>(2 * j + 1)] = rt(j);
    }
    sol.states = states;

    const bool duplicate = std::any_of(
        result.solutions.begin(), result.solutions.end(), [&](const OracleSolution& other) {
          double diff = 0.0;
          for (std::size_t i = 0; i < sol.du.size(); ++i) diff = std::max(diff, std::abs(sol.du[i] - other.du[i]));
          for (std::size_t i = 0; i < sol.r.size(); ++i) diff = std::max(diff, std::abs(sol.r[i] - other.r[i]));
          return diff <= 10.0 * eps;
        });
    if (!duplicate) result.solutions.push_back(std::move(sol));
  }
  return result;
}

}  // namespace pdcontact::verify
