#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qsep/field.hpp"

namespace qsep {

/// Row-major matrix of canonical residues over a prime field.
/// Zero-dimensional matrices are legal everywhere; any product with a
/// 0-dimension operand is the conformal zero matrix.
class DenseMatrix {
 public:
  DenseMatrix() : f_(PrimeField::unchecked(3)), rows_(0), cols_(0) {}
  DenseMatrix(const PrimeField& f, int rows, int cols)
      : f_(f), rows_(rows), cols_(cols),
        a_(size_t(rows) * size_t(cols), 0) {}

  static DenseMatrix identity(const PrimeField& f, int n);
  static DenseMatrix random(const PrimeField& f, int rows, int cols,
                            SeededRng& rng);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const PrimeField& field() const { return f_; }
  bool is_empty() const { return rows_ == 0 || cols_ == 0; }

  uint32_t operator()(int i, int j) const {
    return a_[size_t(i) * cols_ + j];
  }
  uint32_t& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const uint32_t* row_ptr(int i) const { return a_.data() + size_t(i) * cols_; }
  uint32_t* row_ptr(int i) { return a_.data() + size_t(i) * cols_; }

  DenseMatrix transposed() const;
  DenseMatrix block(int r0, int c0, int nr, int nc) const;
  void set_block(int r0, int c0, const DenseMatrix& m);
  DenseMatrix rows_at(const std::vector<int>& idx) const;
  DenseMatrix cols_at(const std::vector<int>& idx) const;

  void add_in_place(const DenseMatrix& m);
  void sub_in_place(const DenseMatrix& m);
  DenseMatrix negated() const;
  bool is_zero() const;

  bool operator==(const DenseMatrix& o) const {
    return f_ == o.f_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool operator!=(const DenseMatrix& o) const { return !(*this == o); }

  const std::vector<uint32_t>& data() const { return a_; }
  std::vector<uint32_t>& data() { return a_; }

 private:
  PrimeField f_;
  int rows_, cols_;
  std::vector<uint32_t> a_;
};

DenseMatrix hconcat(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix vconcat(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);

/// C += A*B, exact.  Throws ShapeError on non-conformal dimensions.
void matmul_acc(DenseMatrix& c, const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Rank-revealing triple A = C*R*E with C in column echelon form (unit
/// pivots, pivot rows strictly increasing), E in row echelon form (pivot
/// columns strictly increasing, pivot values carried here) and R a
/// permutation pairing them.  The pivots reveal the rank profiles of A.
struct CREDecomposition {
  DenseMatrix C;               // m x r
  DenseMatrix E;               // r x n
  std::vector<int> perm;       // C column k pairs with E row perm[k]
  std::vector<int> pivot_rows; // pivot row of C column k, strictly increasing
  std::vector<int> pivot_cols; // pivot column of E row j, strictly increasing
  int rank = 0;

  DenseMatrix perm_matrix() const;  // r x r matrix R with R[k][perm[k]] = 1
  DenseMatrix product() const;      // C*R*E
};

CREDecomposition cre(const DenseMatrix& a);
int rank_of(const DenseMatrix& a);

/// Lexicographically earliest independent rows / columns (0-based, sorted).
std::pair<std::vector<int>, std::vector<int>> rank_profiles(
    const DenseMatrix& a);

/// X with L*X = B for lower-triangular invertible L.
DenseMatrix trsm_lower(const DenseMatrix& l, const DenseMatrix& b);
/// X with X*U = B for upper-triangular invertible U.
DenseMatrix trsm_upper_right(const DenseMatrix& b, const DenseMatrix& u);

/// Any rank-revealing two-factor split A = first*second with inner
/// dimension rank(A).  Backed by cre.
std::pair<DenseMatrix, DenseMatrix> rank_factor(const DenseMatrix& a);

}  // namespace qsep
