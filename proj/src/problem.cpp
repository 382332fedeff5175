#include "pdcontact/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace pdcontact {

void validate(const ProblemInstance& problem) {
  const auto& k = problem.K;
  const auto& ct = problem.contact;
  if (k.rows() != k.cols()) throw DimensionError("stiffness matrix is not square");
  const std::size_t d = k.rows();
  require_size(problem.p.size(), d, "load vector");
  if (ct.m != 1 && ct.m != 2) throw std::invalid_argument("tangential dimension must be 1 or 2");
  const std::size_t m = static_cast<std::size_t>(ct.m);
  require_size(ct.g.size(), ct.c, "gap vector");
  require_size(ct.Tn.rows(), d, "Tn rows");
  require_size(ct.Tn.cols(), ct.c, "Tn columns");
  require_size(ct.Tt.rows(), d, "Tt rows");
  require_size(ct.Tt.cols(), m * ct.c, "Tt columns");
  if (!(problem.mu >= 0.0) || !std::isfinite(problem.mu)) {
    throw std::invalid_argument("friction coefficient must be finite and non-negative");
  }
  if (!all_finite(problem.p)) throw std::invalid_argument("load vector has non-finite entries");
  for (double gj : ct.g) {
    if (!(gj >= 0.0) || !std::isfinite(gj)) {
      throw std::invalid_argument("initial gaps must be finite and non-negative");
    }
  }
  if (!k.structurally_symmetric()) throw std::invalid_argument("stiffness matrix is not symmetric");
}

SparseMatrix assemble_contact_operator(const ContactGeometry& contact) {
  const std::size_t m = static_cast<std::size_t>(contact.m);
  const std::size_t block = 1 + m;
  std::vector<Triplet> entries;
  entries.reserve(contact.Tn.nnz() + contact.Tt.nnz());
  for (const auto& t : contact.Tn.to_triplets()) {
    entries.push_back({t.row, block * t.col, t.value});
  }
  for (const auto& t : contact.Tt.to_triplets()) {
    const std::size_t node = t.col / m;
    entries.push_back({t.row, block * node + 1 + t.col % m, t.value});
  }
  return SparseMatrix::from_triplets(contact.Tn.rows(), block * contact.c, entries);
}

}  // namespace pdcontact
