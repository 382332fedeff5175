#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdcontact {

using Vector = std::vector<double>;

/// Raised when operand sizes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row and every stored
/// value is finite. Instances are immutable once built, so they can be shared
/// read-only between threads.
class SparseMatrix {
 public:
  SparseMatrix() : row_offsets_(1, 0) {}

  /// Takes ownership of raw CSR arrays after validating every invariant.
  SparseMatrix(std::size_t nrows, std::size_t ncols,
               std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, Vector values);

  /// Builds a matrix from coordinate entries. Duplicates are summed; explicit
  /// zeros are kept so the sparsity pattern is exactly what the caller gave.
  static SparseMatrix from_triplets(std::size_t nrows, std::size_t ncols,
                                    std::span<const Triplet> entries);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(std::span<const double> diag);
  static SparseMatrix zero(std::size_t nrows, std::size_t ncols);

  std::size_t rows() const { return nrows_; }
  std::size_t cols() const { return ncols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const { return col_indices_; }
  const Vector& values() const { return values_; }

  /// Entry (i, j), zero when not stored.
  double coeff(std::size_t i, std::size_t j) const;
  Vector diagonal_entries() const;
  std::vector<Triplet> to_triplets() const;
  SparseMatrix transpose() const;
  SparseMatrix scaled(double factor) const;

  bool structurally_symmetric() const;
  /// max |a_ij - a_ji| over stored entries.
  double symmetry_defect() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t nrows_ = 0;
  std::size_t ncols_ = 0;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::size_t> col_indices_;
  Vector values_;
};

/// y = A x. Rows are processed in order, one accumulator per row, so the
/// result is bitwise reproducible.
Vector spmv(const SparseMatrix& a, std::span<const double> x);
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

/// y = A^T x.
Vector spmv_transpose(const SparseMatrix& a, std::span<const double> x);
void spmv_transpose(const SparseMatrix& a, std::span<const double> x,
                    std::span<double> y);

// Small dense-vector helpers shared by the solvers.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
/// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);
bool all_finite(std::span<const double> x);

void require_size(std::size_t got, std::size_t want, const std::string& what);

}  // namespace pdcontact
