#pragma once

#include <vector>

#include "qsep/dense.hpp"

namespace qsep {

struct SparseEntry {
  int row, col;
  uint32_t val;
};

/// Coordinate-list matrix: entries sorted by (row, col), unique positions,
/// nonzero values.  Indices are 0-based in memory; the text format is
/// 1-based.
class SparseMatrix {
 public:
  SparseMatrix() : f_(PrimeField::unchecked(3)), rows_(0), cols_(0) {
    finalize();
  }
  SparseMatrix(const PrimeField& f, int rows, int cols)
      : f_(f), rows_(rows), cols_(cols) {}

  void add_entry(int i, int j, uint32_t v);
  /// Sorts entries, validates ranges/duplicates, builds the row index.
  void finalize();

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t nnz() const { return entries_.size(); }
  const PrimeField& field() const { return f_; }
  const std::vector<SparseEntry>& entries() const { return entries_; }

  // Entry range [row_begin(i), row_end(i)) holds row i in column order.
  size_t row_begin(int i) const { return row_ptr_[i]; }
  size_t row_end(int i) const { return row_ptr_[i + 1]; }

  DenseMatrix to_dense() const;

  /// Dense slice of the given rows restricted to columns [c0, c1).
  DenseMatrix rows_slice(const std::vector<int>& rows, int c0, int c1) const;
  /// Dense slice of rows [r0, r1) restricted to the given columns.
  DenseMatrix cols_slice(int r0, int r1, const std::vector<int>& cols) const;
  /// Sub-block [r0, r1) x [c0, c1) as a sparse matrix.
  SparseMatrix sub_block(int r0, int r1, int c0, int c1) const;

 private:
  PrimeField f_;
  int rows_, cols_;
  std::vector<SparseEntry> entries_;
  std::vector<size_t> row_ptr_;
  bool finalized_ = false;
};

/// Exact dense copy.
DenseMatrix densify(const SparseMatrix& a);

}  // namespace qsep
