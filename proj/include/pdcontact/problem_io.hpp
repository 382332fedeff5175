#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "pdcontact/matrix_market.hpp"
#include "pdcontact/pdsolver.hpp"
#include "pdcontact/problem.hpp"
#include "pdcontact/residuals.hpp"

namespace pdcontact::io {

// Problem file (JSON, "format": "pdcontact-problem", "version": 1):
//   d, c, m, mu, g[c], p[d],
//   K, Tn, Tt as {"rows", "cols", "row": [...], "col": [...], "val": [...]}
//   (0-based CSR triplets in row-major order),
//   info {kind, n_x, n_y, n_z, young, poisson, traction, gap, bc, extent[3]}.
// Doubles are written in shortest round-trip form, so reading a file back
// reproduces every value bit for bit. Malformed input throws IoError.

std::string problem_to_json(const ProblemInstance& problem);
ProblemInstance problem_from_json(const std::string& text);
void write_problem(const std::filesystem::path& path, const ProblemInstance& problem);
ProblemInstance read_problem(const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical problem document, as 16 hex digits.
std::string problem_hash(const ProblemInstance& problem);

/// Solution file ("format": "pdcontact-solution"): du, r, status,
/// iterations, spectral estimates and the residual report.
struct SolutionRecord {
  Vector du;
  Vector r;
  std::string status = "converged";
  std::size_t iterations = 0;
};

std::string solution_to_json(const solver::Solution& sol, const verify::ResidualReport& report);
void write_solution(const std::filesystem::path& path, const solver::Solution& sol,
                    const verify::ResidualReport& report);
SolutionRecord read_solution(const std::filesystem::path& path);

inline constexpr int kHistoryCsvVersion = 1;

/// k, step_norm, alpha, beta, theta, pcg_iters, resid_eq, resid_compl,
/// resid_pen; residual cells stay empty when they were not recorded.
void write_history_csv(std::ostream& out, const std::vector<solver::IterationRecord>& history);
void write_history_csv(const std::filesystem::path& path,
                       const std::vector<solver::IterationRecord>& history);

}  // namespace pdcontact::io
