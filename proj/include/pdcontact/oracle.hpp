#pragma once

#include <vector>

#include "pdcontact/problem.hpp"

namespace pdcontact::verify {

/// Node state of one enumerated combination. slip_pos slides towards +t
/// (r_t = mu r_n), slip_neg towards -t (r_t = -mu r_n).
enum class OracleState { free, stick, slip_pos, slip_neg };

const char* to_string(OracleState s);

struct OracleSolution {
  Vector du;
  Vector r;  // node-major (r_n1, r_t1, ...)
  std::vector<OracleState> states;
};

struct OracleResult {
  std::vector<OracleSolution> solutions;  // distinct accepted solutions
  std::size_t combinations = 0;
  std::size_t singular = 0;  // combinations skipped for a singular system

  bool unique() const { return solutions.size() == 1; }
};

inline constexpr std::size_t kOracleMaxNodes = 6;

/// True for planar problems (m = 1) with at most kOracleMaxNodes candidates.
bool oracle_eligible(const ProblemInstance& problem);

/// Brute-force certification of small planar problems: every one of the 4^c
/// state combinations fixes a square linear system in (du, r_n, r_t), which
/// is solved densely; a combination is accepted when gaps, normal reactions,
/// the stick cone bound and the slip directions all hold within
/// tol * max(1, ||solution||_inf). Accepted solutions closer than that bound
/// are merged. Throws std::invalid_argument for ineligible problems.
OracleResult oracle_enumerate(const ProblemInstance& problem, double tol = 1e-10);

}  // namespace pdcontact::verify
