#include "qsep/sparse.hpp"

#include <algorithm>

namespace qsep {

void SparseMatrix::add_entry(int i, int j, uint32_t v) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw ShapeError("sparse entry out of range");
  if (v == 0 || v >= f_.p())
    throw ParamError("sparse entry value must be a nonzero residue");
  entries_.push_back({i, j, v});
  finalized_ = false;
}

void SparseMatrix::finalize() {
  std::sort(entries_.begin(), entries_.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  for (size_t k = 1; k < entries_.size(); ++k) {
    if (entries_[k].row == entries_[k - 1].row &&
        entries_[k].col == entries_[k - 1].col)
      throw ParamError("duplicate sparse entry");
  }
  row_ptr_.assign(size_t(rows_) + 1, 0);
  for (const auto& e : entries_) ++row_ptr_[size_t(e.row) + 1];
  for (int i = 0; i < rows_; ++i) row_ptr_[i + 1] += row_ptr_[i];
  finalized_ = true;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(f_, rows_, cols_);
  for (const auto& e : entries_) d(e.row, e.col) = e.val;
  return d;
}

DenseMatrix SparseMatrix::rows_slice(const std::vector<int>& rows, int c0,
                                     int c1) const {
  DenseMatrix d(f_, int(rows.size()), c1 - c0);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t k = row_begin(rows[i]); k < row_end(rows[i]); ++k) {
      const auto& e = entries_[k];
      if (e.col >= c0 && e.col < c1) d(int(i), e.col - c0) = e.val;
    }
  }
  return d;
}

DenseMatrix SparseMatrix::cols_slice(int r0, int r1,
                                     const std::vector<int>& cols) const {
  DenseMatrix d(f_, r1 - r0, int(cols.size()));
  std::vector<int> where(size_t(cols_), -1);
  for (size_t j = 0; j < cols.size(); ++j) where[cols[j]] = int(j);
  for (int i = r0; i < r1; ++i) {
    for (size_t k = row_begin(i); k < row_end(i); ++k) {
      const auto& e = entries_[k];
      if (where[e.col] >= 0) d(i - r0, where[e.col]) = e.val;
    }
  }
  return d;
}

SparseMatrix SparseMatrix::sub_block(int r0, int r1, int c0, int c1) const {
  SparseMatrix s(f_, r1 - r0, c1 - c0);
  for (int i = r0; i < r1; ++i) {
    for (size_t k = row_begin(i); k < row_end(i); ++k) {
      const auto& e = entries_[k];
      if (e.col >= c0 && e.col < c1) s.add_entry(i - r0, e.col - c0, e.val);
    }
  }
  s.finalize();
  return s;
}

DenseMatrix densify(const SparseMatrix& a) { return a.to_dense(); }

}  // namespace qsep
