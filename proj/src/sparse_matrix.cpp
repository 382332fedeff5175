#include "pdcontact/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pdcontact {

void require_size(std::size_t got, std::size_t want, const std::string& what) {
  if (got != want) {
    throw DimensionError(what + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

SparseMatrix::SparseMatrix(std::size_t nrows, std::size_t ncols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, Vector values)
    : nrows_(nrows),
      ncols_(ncols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != nrows_ + 1 || row_offsets_.front() != 0) {
    throw std::invalid_argument("SparseMatrix: row_offsets must have nrows+1 entries starting at 0");
  }
  if (col_indices_.size() != values_.size() || row_offsets_.back() != values_.size()) {
    throw std::invalid_argument("SparseMatrix: nnz mismatch between offsets, indices and values");
  }
  for (std::size_t i = 0; i < nrows_; ++i) {
    if (row_offsets_[i + 1] < row_offsets_[i]) {
      throw std::invalid_argument("SparseMatrix: row_offsets must be nondecreasing");
    }
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] >= ncols_) {
        throw std::invalid_argument("SparseMatrix: column index out of range");
      }
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
        throw std::invalid_argument("SparseMatrix: column indices must be strictly increasing per row");
      }
    }
  }
  if (!all_finite(values_)) {
    throw std::invalid_argument("SparseMatrix: non-finite value");
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t nrows, std::size_t ncols,
                                         std::span<const Triplet> entries) {
  std::vector<Triplet> sorted(entries.begin(), entries.end());
  for (const auto& t : sorted) {
    if (t.row >= nrows || t.col >= ncols) {
      throw std::invalid_argument("SparseMatrix::from_triplets: entry out of range");
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<std::size_t> offsets(nrows + 1, 0);
  std::vector<std::size_t> cols;
  Vector vals;
  cols.reserve(sorted.size());
  vals.reserve(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& t = sorted[k];
    if (k > 0 && sorted[k - 1].row == t.row && sorted[k - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(nrows, ncols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  return diagonal(Vector(n, 1.0));
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> diag) {
  const std::size_t n = diag.size();
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n);
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), Vector(diag.begin(), diag.end()));
}

SparseMatrix SparseMatrix::zero(std::size_t nrows, std::size_t ncols) {
  return SparseMatrix(nrows, ncols, std::vector<std::size_t>(nrows + 1, 0), {}, {});
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
  if (i >= nrows_ || j >= ncols_) {
    throw std::out_of_range("SparseMatrix::coeff: index out of range");
  }
  const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

Vector SparseMatrix::diagonal_entries() const {
  Vector d(std::min(nrows_, ncols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

std::vector<Triplet> SparseMatrix::to_triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t i = 0; i < nrows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      out.push_back({i, col_indices_[k], values_[k]});
    }
  }
  return out;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> offsets(ncols_ + 1, 0);
  for (std::size_t c : col_indices_) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<std::size_t> cols(nnz());
  Vector vals(nnz());
  for (std::size_t i = 0; i < nrows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::size_t dst = cursor[col_indices_[k]]++;
      cols[dst] = i;
      vals[dst] = values_[k];
    }
  }
  return SparseMatrix(ncols_, nrows_, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::scaled(double factor) const {
  Vector vals(values_);
  for (double& v : vals) v *= factor;
  return SparseMatrix(nrows_, ncols_, row_offsets_, col_indices_, std::move(vals));
}

bool SparseMatrix::structurally_symmetric() const {
  if (nrows_ != ncols_) return false;
  const SparseMatrix t = transpose();
  return t.row_offsets_ == row_offsets_ && t.col_indices_ == col_indices_;
}

double SparseMatrix::symmetry_defect() const {
  if (nrows_ != ncols_) {
    throw DimensionError("symmetry_defect: matrix is not square");
  }
  double defect = 0.0;
  for (std::size_t i = 0; i < nrows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      defect = std::max(defect, std::abs(values_[k] - coeff(col_indices_[k], i)));
    }
  }
  return defect;
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  require_size(x.size(), a.cols(), "spmv input");
  require_size(y.size(), a.rows(), "spmv output");
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) acc += val[k] * x[col[k]];
    y[i] = acc;
  }
}

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
  Vector y(a.rows());
  spmv(a, x, y);
  return y;
}

void spmv_transpose(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  require_size(x.size(), a.rows(), "spmv_transpose input");
  require_size(y.size(), a.cols(), "spmv_transpose output");
  std::fill(y.begin(), y.end(), 0.0);
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) y[col[k]] += val[k] * xi;
  }
}

Vector spmv_transpose(const SparseMatrix& a, std::span<const double> x) {
  Vector y(a.cols());
  spmv_transpose(a, x, y);
  return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_size(y.size(), x.size(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  require_size(y.size(), x.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace pdcontact
