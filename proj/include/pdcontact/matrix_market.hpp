#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "pdcontact/sparse_matrix.hpp"

namespace pdcontact {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix Market exchange format. Values are written with 17 significant
// digits so a write/read cycle reproduces every double bit for bit.

/// "%%MatrixMarket matrix coordinate real general", 1-based indices.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a);

/// Reads coordinate real/integer/pattern matrices, general or symmetric.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// Dense column vector as "%%MatrixMarket matrix array real general", n x 1.
void write_matrix_market_vector(const std::filesystem::path& path, std::span<const double> v);
Vector read_matrix_market_vector(const std::filesystem::path& path);

}  // namespace pdcontact
