#include "qsep/dense.hpp"

#include <algorithm>
#include <numeric>

namespace qsep {

DenseMatrix DenseMatrix::identity(const PrimeField& f, int n) {
  DenseMatrix m(f, n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

DenseMatrix DenseMatrix::random(const PrimeField& f, int rows, int cols,
                                SeededRng& rng) {
  DenseMatrix m(f, rows, cols);
  for (auto& x : m.a_) x = rng.uniform(f);
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(f_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::block(int r0, int c0, int nr, int nc) const {
  if (r0 < 0 || c0 < 0 || nr < 0 || nc < 0 || r0 + nr > rows_ ||
      c0 + nc > cols_)
    throw ShapeError("block out of range");
  DenseMatrix b(f_, nr, nc);
  for (int i = 0; i < nr; ++i)
    std::copy_n(row_ptr(r0 + i) + c0, nc, b.row_ptr(i));
  return b;
}

void DenseMatrix::set_block(int r0, int c0, const DenseMatrix& m) {
  if (r0 < 0 || c0 < 0 || r0 + m.rows() > rows_ || c0 + m.cols() > cols_)
    throw ShapeError("set_block out of range");
  for (int i = 0; i < m.rows(); ++i)
    std::copy_n(m.row_ptr(i), m.cols(), row_ptr(r0 + i) + c0);
}

DenseMatrix DenseMatrix::rows_at(const std::vector<int>& idx) const {
  DenseMatrix r(f_, int(idx.size()), cols_);
  for (size_t i = 0; i < idx.size(); ++i)
    std::copy_n(row_ptr(idx[i]), cols_, r.row_ptr(int(i)));
  return r;
}

DenseMatrix DenseMatrix::cols_at(const std::vector<int>& idx) const {
  DenseMatrix r(f_, rows_, int(idx.size()));
  for (int i = 0; i < rows_; ++i)
    for (size_t j = 0; j < idx.size(); ++j) r(i, int(j)) = (*this)(i, idx[j]);
  return r;
}

void DenseMatrix::add_in_place(const DenseMatrix& m) {
  if (rows_ != m.rows_ || cols_ != m.cols_ || f_ != m.f_)
    throw ShapeError("add: shape or field mismatch");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] = f_.add(a_[i], m.a_[i]);
}

void DenseMatrix::sub_in_place(const DenseMatrix& m) {
  if (rows_ != m.rows_ || cols_ != m.cols_ || f_ != m.f_)
    throw ShapeError("sub: shape or field mismatch");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] = f_.sub(a_[i], m.a_[i]);
}

DenseMatrix DenseMatrix::negated() const {
  DenseMatrix m(*this);
  for (auto& x : m.a_) x = f_.neg(x);
  return m;
}

bool DenseMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](uint32_t x) { return x == 0; });
}

DenseMatrix hconcat(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() == 0 && a.rows() == b.rows()) return b;
  if (b.cols() == 0 && b.rows() == a.rows()) return a;
  if (a.rows() != b.rows() || a.field() != b.field())
    throw ShapeError("hconcat: row count mismatch");
  DenseMatrix r(a.field(), a.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  return r;
}

DenseMatrix vconcat(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() == 0 && a.cols() == b.cols()) return b;
  if (b.rows() == 0 && b.cols() == a.cols()) return a;
  if (a.cols() != b.cols() || a.field() != b.field())
    throw ShapeError("vconcat: column count mismatch");
  DenseMatrix r(a.field(), a.rows() + b.rows(), a.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), 0, b);
  return r;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix r(a);
  r.add_in_place(b);
  return r;
}

void matmul_acc(DenseMatrix& c, const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols())
    throw ShapeError("matmul_acc: non-conformal dimensions");
  if (a.field() != b.field() || a.field() != c.field())
    throw ShapeError("matmul_acc: field mismatch");
  const PrimeField& f = c.field();
  const int m = a.rows(), k = a.cols(), n = b.cols();
  if (m == 0 || k == 0 || n == 0) return;
  const uint64_t budget = f.acc_budget();
  std::vector<uint64_t> acc(size_t(n), 0);
  for (int i = 0; i < m; ++i) {
    const uint32_t* arow = a.row_ptr(i);
    uint32_t* crow = c.row_ptr(i);
    for (int j = 0; j < n; ++j) acc[j] = crow[j];
    uint64_t used = 1;  // the preloaded C entry counts as one addend
    for (int kk = 0; kk < k; ++kk) {
      uint64_t av = arow[kk];
      if (av == 0) continue;
      if (++used > budget) {
        for (int j = 0; j < n; ++j) acc[j] %= f.p();
        used = 2;
      }
      const uint32_t* brow = b.row_ptr(kk);
      for (int j = 0; j < n; ++j) acc[j] += av * brow[j];
    }
    for (int j = 0; j < n; ++j) crow[j] = f.reduce64(acc[j]);
  }
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.field(), a.rows(), b.cols());
  matmul_acc(c, a, b);
  return c;
}

DenseMatrix CREDecomposition::perm_matrix() const {
  DenseMatrix r(C.field(), rank, rank);
  for (int k = 0; k < rank; ++k) r(k, perm[k]) = 1;
  return r;
}

DenseMatrix CREDecomposition::product() const {
  // C*R*E as sum of pivot outer products; avoids materializing R.
  DenseMatrix out(C.field(), C.rows(), E.cols());
  const PrimeField& f = C.field();
  for (int k = 0; k < rank; ++k) {
    int er = perm[k];
    for (int i = pivot_rows[k]; i < C.rows(); ++i) {
      uint32_t cv = C(i, k);
      if (cv == 0) continue;
      uint32_t* orow = out.row_ptr(i);
      const uint32_t* erow = E.row_ptr(er);
      for (int j = 0; j < E.cols(); ++j) {
        if (erow[j]) orow[j] = f.add(orow[j], f.mul(cv, erow[j]));
      }
    }
  }
  return out;
}

// Gaussian elimination choosing, at each step, the remaining nonzero entry
// with lexicographically minimal (row, column).  With that pivoting the C
// pivot rows are the row rank profile and the E pivot columns the column
// rank profile.  C gets unit pivots; the pivot value stays in E.
CREDecomposition cre(const DenseMatrix& a) {
  const PrimeField& f = a.field();
  const int m = a.rows(), n = a.cols();
  DenseMatrix w(a);
  std::vector<std::vector<uint32_t>> ccols;  // columns of C, step order
  std::vector<std::vector<uint32_t>> erows;  // rows of E, step order
  std::vector<int> prow, pcol;               // pivots in step order

  int scan = 0;
  while (scan < m) {
    // Rows above `scan` are pivot rows or permanently zero.
    int pi = -1, pj = -1;
    for (int i = scan; i < m && pi < 0; ++i) {
      const uint32_t* row = w.row_ptr(i);
      for (int j = 0; j < n; ++j) {
        if (row[j]) {
          pi = i;
          pj = j;
          break;
        }
      }
      if (pi < 0) scan = i + 1;
    }
    if (pi < 0) break;
    const uint32_t piv = w(pi, pj);
    const uint32_t piv_inv = f.inv(piv);

    std::vector<uint32_t> col(m, 0);
    col[pi] = 1;
    for (int i = pi + 1; i < m; ++i)
      col[i] = f.mul(w(i, pj), piv_inv);
    std::vector<uint32_t> row(w.row_ptr(pi), w.row_ptr(pi) + n);

    // Rank-one elimination below the pivot row.
    for (int i = pi + 1; i < m; ++i) {
      uint32_t c = col[i];
      if (c == 0) continue;
      uint32_t* wr = w.row_ptr(i);
      for (int j = 0; j < n; ++j) {
        if (row[j]) wr[j] = f.sub(wr[j], f.mul(c, row[j]));
      }
    }

    ccols.push_back(std::move(col));
    erows.push_back(std::move(row));
    prow.push_back(pi);
    pcol.push_back(pj);
    scan = pi + 1;
  }

  const int r = int(ccols.size());
  CREDecomposition d;
  d.rank = r;
  d.C = DenseMatrix(f, m, r);
  for (int k = 0; k < r; ++k)
    for (int i = 0; i < m; ++i) d.C(i, k) = ccols[k][i];
  d.pivot_rows = prow;  // already strictly increasing

  // E rows sorted by pivot column.
  std::vector<int> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return pcol[x] < pcol[y]; });
  d.E = DenseMatrix(f, r, n);
  d.pivot_cols.resize(r);
  std::vector<int> pos(r);
  for (int j = 0; j < r; ++j) {
    int k = order[j];
    pos[k] = j;
    d.pivot_cols[j] = pcol[k];
    std::copy(erows[k].begin(), erows[k].end(), d.E.row_ptr(j));
  }
  d.perm.resize(r);
  for (int k = 0; k < r; ++k) d.perm[k] = pos[k];
  return d;
}

int rank_of(const DenseMatrix& a) { return cre(a).rank; }

std::pair<std::vector<int>, std::vector<int>> rank_profiles(
    const DenseMatrix& a) {
  CREDecomposition d = cre(a);
  return {d.pivot_rows, d.pivot_cols};
}

DenseMatrix trsm_lower(const DenseMatrix& l, const DenseMatrix& b) {
  if (l.rows() != l.cols() || l.rows() != b.rows())
    throw ShapeError("trsm_lower: non-conformal dimensions");
  const PrimeField& f = b.field();
  const int r = l.rows(), n = b.cols();
  DenseMatrix x(f, r, n);
  std::vector<uint64_t> acc(size_t(std::max(n, 1)), 0);
  const uint64_t budget = f.acc_budget();
  for (int i = 0; i < r; ++i) {
    if (l(i, i) == 0) throw SingularError("trsm_lower: zero diagonal");
    const uint32_t di = f.inv(l(i, i));
    for (int j = 0; j < n; ++j) acc[j] = 0;
    uint64_t used = 0;
    for (int k = 0; k < i; ++k) {
      uint64_t lv = l(i, k);
      if (lv == 0) continue;
      if (++used > budget) {
        for (int j = 0; j < n; ++j) acc[j] %= f.p();
        used = 1;
      }
      const uint32_t* xrow = x.row_ptr(k);
      for (int j = 0; j < n; ++j) acc[j] += lv * xrow[j];
    }
    for (int j = 0; j < n; ++j) {
      uint32_t s = f.reduce64(acc[j]);
      x(i, j) = f.mul(f.sub(b(i, j), s), di);
    }
  }
  return x;
}

DenseMatrix trsm_upper_right(const DenseMatrix& b, const DenseMatrix& u) {
  if (u.rows() != u.cols() || u.rows() != b.cols())
    throw ShapeError("trsm_upper_right: non-conformal dimensions");
  const PrimeField& f = b.field();
  const int r = u.rows(), m = b.rows();
  DenseMatrix x(f, m, r);
  for (int j = 0; j < r; ++j) {
    if (u(j, j) == 0) throw SingularError("trsm_upper_right: zero diagonal");
    const uint32_t dj = f.inv(u(j, j));
    for (int i = 0; i < m; ++i) {
      uint64_t s = 0;
      uint64_t used = 0;
      for (int k = 0; k < j; ++k) {
        if (u(k, j) == 0) continue;
        if (++used > f.acc_budget()) {
          s %= f.p();
          used = 1;
        }
        s += uint64_t(x(i, k)) * u(k, j);
      }
      x(i, j) = f.mul(f.sub(b(i, j), f.reduce64(s)), dj);
    }
  }
  return x;
}

std::pair<DenseMatrix, DenseMatrix> rank_factor(const DenseMatrix& a) {
  CREDecomposition d = cre(a);
  // Fold the permutation into the right factor: rows of R*E.
  DenseMatrix re(a.field(), d.rank, a.cols());
  for (int k = 0; k < d.rank; ++k)
    std::copy_n(d.E.row_ptr(d.perm[k]), a.cols(), re.row_ptr(k));
  return {std::move(d.C), std::move(re)};
}

}  // namespace qsep
