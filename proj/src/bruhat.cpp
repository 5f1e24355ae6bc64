#include "qsep/bruhat.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace qsep {

DenseMatrix left_part(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("left_part: not square");
  const int n = a.rows();
  DenseMatrix r(a.field(), n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; i + j <= n - 2 && j < n; ++j) r(i, j) = a(i, j);
  return r;
}

DenseMatrix reverse_rows(const DenseMatrix& a) {
  DenseMatrix r(a.field(), a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    std::copy_n(a.row_ptr(a.rows() - 1 - i), a.cols(), r.row_ptr(i));
  return r;
}

DenseMatrix reverse_cols(const DenseMatrix& a) {
  DenseMatrix r(a.field(), a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, a.cols() - 1 - j);
  return r;
}

size_t EchelonFactor::storage() const {
  size_t s = 0;
  for (const auto& r : run) s += r.size();
  return s;
}

DenseMatrix EchelonFactor::to_dense(const PrimeField& f) const {
  DenseMatrix m(f, dim, count());
  for (int k = 0; k < count(); ++k)
    for (size_t i = 0; i < run[k].size(); ++i)
      m(pivot[k] + int(i), k) = run[k][i];
  return m;
}

int EchelonFactor::overlap_depth() const {
  // Sweep of the column support intervals [pivot, pivot + len).
  std::vector<int> delta(size_t(dim) + 1, 0);
  for (int k = 0; k < count(); ++k) {
    ++delta[pivot[k]];
    --delta[pivot[k] + int(run[k].size())];
  }
  int depth = 0, cur = 0;
  for (int i = 0; i < dim; ++i) {
    cur += delta[i];
    depth = std::max(depth, cur);
  }
  return depth;
}

size_t BruhatGenerator::storage() const {
  return diag.size() + CL.storage() + EL.storage() + CU.storage() +
         EU.storage();
}

// ---------------------------------------------------------------------------
// Generic Crout-scheme generation.

namespace {

// live(i, j) in call-local 0-based coordinates of an m x m left-triangular
// operand: i + j <= m - 2.
inline bool live_local(int i, int j, int m) { return i + j <= m - 2; }

// CRE with elimination confined to the local live region i + j <= bound.
// Rank-one updates are truncated at the anti-diagonal, so no fill ever
// lands in the dead region and every pivot stays live; the result is
// Left(C*R*E) = input restricted to live positions.  For a fully live
// block this is a plain rank-profile-revealing CRE.
CREDecomposition left_restricted_cre(DenseMatrix w, int bound) {
  const PrimeField& f = w.field();
  const int m = w.rows(), n = w.cols();
  for (int i = 0; i < m; ++i)
    for (int j = std::max(bound - i + 1, 0); j < n; ++j) w(i, j) = 0;
  auto width = [&](int i) {
    return std::max(std::min(bound - i + 1, n), 0);
  };

  std::vector<std::vector<uint32_t>> ccols, erows;
  std::vector<int> prow, pcol;
  int scan = 0;
  while (scan < m) {
    int pi = -1, pj = -1;
    for (int i = scan; i < m && pi < 0; ++i) {
      const uint32_t* row = w.row_ptr(i);
      const int wi = width(i);
      for (int j = 0; j < wi; ++j) {
        if (row[j]) {
          pi = i;
          pj = j;
          break;
        }
      }
      if (pi < 0) scan = i + 1;
    }
    if (pi < 0) break;
    const uint32_t piv_inv = f.inv(w(pi, pj));
    std::vector<uint32_t> col(size_t(m), 0);
    col[pi] = 1;
    for (int i = pi + 1; i < m; ++i) col[i] = f.mul(w(i, pj), piv_inv);
    std::vector<uint32_t> row(w.row_ptr(pi), w.row_ptr(pi) + n);
    for (int i = pi + 1; i < m; ++i) {
      uint32_t c = col[i];
      if (c == 0) continue;
      uint32_t* wr = w.row_ptr(i);
      const int wi = width(i);
      for (int j = 0; j < wi; ++j)
        if (row[j]) wr[j] = f.sub(wr[j], f.mul(c, row[j]));
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
  d.pivot_rows = prow;
  std::vector<int> order(size_t(r), 0);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return pcol[x] < pcol[y]; });
  d.E = DenseMatrix(f, r, n);
  d.pivot_cols.resize(size_t(r));
  d.perm.resize(size_t(r));
  for (int j = 0; j < r; ++j) {
    int k = order[j];
    d.perm[k] = j;
    d.pivot_cols[j] = pcol[k];
    std::copy(erows[k].begin(), erows[k].end(), d.E.row_ptr(j));
  }
  return d;
}

void check_echelon_pivots(const std::vector<int>& piv, const char* what) {
  for (size_t k = 1; k < piv.size(); ++k)
    if (piv[k] <= piv[k - 1])
      throw Error(std::string("lbruhat_gen: pivot collision in ") + what);
}

}  // namespace

CREDecomposition lbruhat_gen(LeftOracle& oracle, int row_off, int col_off,
                             int m, const DenseMatrix& g,
                             const DenseMatrix& h, int base_threshold) {
  if (m <= std::max(base_threshold, 1))
    return oracle.bbcre(row_off, col_off, m, m, g, h);
  const PrimeField& f = g.field();
  const int half = m / 2;      // A11 is half x half, fully live
  const int mh = m - half;     // both recursion squares are mh x mh

  CREDecomposition t0 =
      oracle.bbcre(row_off, col_off, half, half,
                   g.block(0, 0, half, g.cols()), h.block(0, 0, half, h.cols()));
  const int r0 = t0.rank;
  const std::vector<int>& rrp = t0.pivot_rows;
  const std::vector<int>& crp = t0.pivot_cols;

  DenseMatrix lfac = t0.C.rows_at(rrp);  // unit lower triangular
  DenseMatrix ufac = t0.E.cols_at(crp);  // upper triangular

  // Completion of the pivot rows into A12: rows(A12, rrp) is recovered on
  // the left triangle as L*B12 + G1[rrp]*H2^T.
  std::vector<int> rrp_glob(rrp);
  for (int& x : rrp_glob) x += row_off;
  DenseMatrix x12 = oracle.rows_slice(rrp_glob, col_off + half, col_off + m);
  if (g.cols() > 0)
    x12.sub_in_place(
        matmul(g.rows_at(rrp), h.block(half, 0, mh, h.cols()).transposed()));
  DenseMatrix b12 = r0 > 0 ? trsm_lower(lfac, x12) : DenseMatrix(f, 0, mh);
  for (int k = 0; k < r0; ++k)
    for (int j = 0; j < mh; ++j)
      if (!live_local(rrp[k], half + j, m)) b12(k, j) = 0;

  // Completion of the pivot columns into A21.
  std::vector<int> crp_glob(crp);
  for (int& x : crp_glob) x += col_off;
  DenseMatrix y21 = oracle.cols_slice(row_off + half, row_off + m, crp_glob);
  if (g.cols() > 0)
    y21.sub_in_place(
        matmul(g.block(half, 0, mh, g.cols()), h.rows_at(crp).transposed()));
  DenseMatrix b21 =
      r0 > 0 ? trsm_upper_right(y21, ufac) : DenseMatrix(f, mh, 0);
  for (int i = 0; i < mh; ++i)
    for (int k = 0; k < r0; ++k)
      if (!live_local(half + i, crp[k], m)) b21(i, k) = 0;

  // Recurse on A21 (rows [half, m) x cols [0, mh)): the eliminated pivots
  // are carried as the correction [G2 | B21] * [H1 | E0^T]^T, which cancels
  // the pivot columns on the left triangle.
  DenseMatrix e0t(f, mh, r0);
  for (int j = 0; j < half; ++j)
    for (int k = 0; k < r0; ++k) e0t(j, k) = t0.E(k, j);
  CREDecomposition t1 =
      lbruhat_gen(oracle, row_off + half, col_off, mh,
                  hconcat(g.block(half, 0, mh, g.cols()), b21),
                  hconcat(h.block(0, 0, mh, h.cols()), e0t), base_threshold);

  // Recurse on A12 (rows [0, mh) x cols [half, m)) with [G1 | C0]*[H2 | B12^T]^T.
  DenseMatrix c0ext(f, mh, r0);
  c0ext.set_block(0, 0, t0.C);
  CREDecomposition t2 = lbruhat_gen(
      oracle, row_off, col_off + half, mh,
      hconcat(g.block(0, 0, mh, g.cols()), c0ext),
      hconcat(h.block(half, 0, mh, h.cols()), b12.transposed()),
      base_threshold);

  // Assemble.  C column blocks [C0, C2, C1]; E row blocks [E0, E1, E2];
  // pairings C0<->E0, C2<->E2, C1<->E1.
  const int r1 = t1.rank, r2 = t2.rank;
  const int u = r0 + r1 + r2;
  CREDecomposition out;
  out.rank = u;
  out.C = DenseMatrix(f, m, u);
  out.E = DenseMatrix(f, u, m);
  out.perm.resize(u);
  out.pivot_rows.resize(u);
  out.pivot_cols.resize(u);

  for (int k = 0; k < r0; ++k) {
    for (int i = 0; i < half; ++i) out.C(i, k) = t0.C(i, k);
    for (int i = 0; i < mh; ++i) out.C(half + i, k) = b21(i, t0.perm[k]);
    out.pivot_rows[k] = rrp[k];
    out.perm[k] = t0.perm[k];
  }
  for (int k = 0; k < r2; ++k) {
    for (int i = 0; i < mh; ++i) out.C(i, r0 + k) = t2.C(i, k);
    out.pivot_rows[r0 + k] = t2.pivot_rows[k];
    out.perm[r0 + k] = r0 + r1 + t2.perm[k];
  }
  for (int k = 0; k < r1; ++k) {
    for (int i = 0; i < mh; ++i) out.C(half + i, r0 + r2 + k) = t1.C(i, k);
    out.pivot_rows[r0 + r2 + k] = half + t1.pivot_rows[k];
    out.perm[r0 + r2 + k] = r0 + t1.perm[k];
  }

  std::vector<int> inv0(r0);
  for (int k = 0; k < r0; ++k) inv0[t0.perm[k]] = k;
  for (int j = 0; j < r0; ++j) {
    for (int c = 0; c < half; ++c) out.E(j, c) = t0.E(j, c);
    for (int c = 0; c < mh; ++c) out.E(j, half + c) = b12(inv0[j], c);
    out.pivot_cols[j] = crp[j];
  }
  for (int j = 0; j < r1; ++j) {
    for (int c = 0; c < mh; ++c) out.E(r0 + j, c) = t1.E(j, c);
    out.pivot_cols[r0 + j] = t1.pivot_cols[j];
  }
  for (int j = 0; j < r2; ++j) {
    for (int c = 0; c < mh; ++c) out.E(r0 + r1 + j, half + c) = t2.E(j, c);
    out.pivot_cols[r0 + r1 + j] = half + t2.pivot_cols[j];
  }

  // Sort the first r0 + r2 columns of C by pivot row and the first r0 + r1
  // rows of E by pivot column; the trailing blocks already sit above every
  // later pivot.
  std::vector<int> corder(u), eorder(u);
  std::iota(corder.begin(), corder.end(), 0);
  std::iota(eorder.begin(), eorder.end(), 0);
  std::stable_sort(corder.begin(), corder.begin() + r0 + r2,
                   [&](int a, int b) {
                     return out.pivot_rows[a] < out.pivot_rows[b];
                   });
  std::stable_sort(eorder.begin(), eorder.begin() + r0 + r1,
                   [&](int a, int b) {
                     return out.pivot_cols[a] < out.pivot_cols[b];
                   });
  std::vector<int> epos(u);
  for (int j = 0; j < u; ++j) epos[eorder[j]] = j;

  CREDecomposition sorted;
  sorted.rank = u;
  sorted.C = DenseMatrix(f, m, u);
  sorted.E = DenseMatrix(f, u, m);
  sorted.perm.resize(u);
  sorted.pivot_rows.resize(u);
  sorted.pivot_cols.resize(u);
  for (int k = 0; k < u; ++k) {
    int old = corder[k];
    for (int i = 0; i < m; ++i) sorted.C(i, k) = out.C(i, old);
    sorted.pivot_rows[k] = out.pivot_rows[old];
    sorted.perm[k] = epos[out.perm[old]];
  }
  for (int j = 0; j < u; ++j) {
    int old = eorder[j];
    std::copy_n(out.E.row_ptr(old), m, sorted.E.row_ptr(j));
    sorted.pivot_cols[j] = out.pivot_cols[old];
  }
  check_echelon_pivots(sorted.pivot_rows, "C");
  check_echelon_pivots(sorted.pivot_cols, "E");
  return sorted;
}

// ---------------------------------------------------------------------------
// Dense oracle.

namespace {

class DenseLeftOracle final : public LeftOracle {
 public:
  explicit DenseLeftOracle(DenseMatrix op) : t_(std::move(op)) {}
  int n() const override { return t_.rows(); }

  CREDecomposition bbcre(int r0, int c0, int mr, int mc, const DenseMatrix& g,
                         const DenseMatrix& h) override {
    DenseMatrix m = t_.block(r0, c0, mr, mc);
    if (g.cols() > 0) m.sub_in_place(matmul(g, h.transposed()));
    return left_restricted_cre(std::move(m), n() - 2 - r0 - c0);
  }

  DenseMatrix rows_slice(const std::vector<int>& rows, int c0,
                         int c1) const override {
    DenseMatrix out(t_.field(), int(rows.size()), c1 - c0);
    for (size_t i = 0; i < rows.size(); ++i)
      std::copy_n(t_.row_ptr(rows[i]) + c0, c1 - c0, out.row_ptr(int(i)));
    return out;
  }

  DenseMatrix cols_slice(int r0, int r1,
                         const std::vector<int>& cols) const override {
    DenseMatrix out(t_.field(), r1 - r0, int(cols.size()));
    for (int i = r0; i < r1; ++i)
      for (size_t j = 0; j < cols.size(); ++j)
        out(i - r0, int(j)) = t_(i, cols[j]);
    return out;
  }

 private:
  DenseMatrix t_;
};

// Compacts one side of a generated triple, truncating every column run at
// the anti-diagonal bound set by its paired pivot: entries past it only ever
// multiply into the dead region, so Left(C*R*E) is unchanged and the stored
// window of pivot (p, q) is confined to [p, n-1-q).
EchelonFactor compact_columns(const DenseMatrix& c,
                              const std::vector<int>& pivots,
                              const std::vector<int>& cutoffs) {
  EchelonFactor fac;
  fac.dim = c.rows();
  fac.pivot = pivots;
  fac.run.resize(pivots.size());
  for (size_t k = 0; k < pivots.size(); ++k) {
    int last = std::max(std::min(cutoffs[k], c.rows() - 1), pivots[k]);
    while (last > pivots[k] && c(last, int(k)) == 0) --last;
    fac.run[k].resize(size_t(last - pivots[k]) + 1);
    for (int i = pivots[k]; i <= last; ++i)
      fac.run[k][size_t(i - pivots[k])] = c(i, int(k));
  }
  return fac;
}

struct CompactTriple {
  EchelonFactor c, e;
  std::vector<int> perm;
};

CompactTriple compactify(const CREDecomposition& d, int n) {
  CompactTriple out;
  out.perm = d.perm;
  std::vector<int> ccut(size_t(d.rank), 0), ecut(size_t(d.rank), 0);
  for (int k = 0; k < d.rank; ++k)
    ccut[k] = n - 2 - d.pivot_cols[d.perm[k]];
  std::vector<int> inv(size_t(d.rank), 0);
  for (int k = 0; k < d.rank; ++k) inv[d.perm[k]] = k;
  for (int j = 0; j < d.rank; ++j)
    ecut[j] = n - 2 - d.pivot_rows[inv[j]];
  out.c = compact_columns(d.C, d.pivot_rows, ccut);
  out.e = compact_columns(d.E.transposed(), d.pivot_cols, ecut);
  return out;
}

DenseMatrix strict_lower_left(const DenseMatrix& a) {
  // J * strictlower(A): left triangular, rows reversed.
  const int n = a.rows();
  DenseMatrix t(a.field(), n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n - 1 - i; ++j) t(i, j) = a(n - 1 - i, j);
  return t;
}

DenseMatrix strict_upper_left(const DenseMatrix& a) {
  // strictupper(A) * J: left triangular, columns reversed.
  const int n = a.rows();
  DenseMatrix t(a.field(), n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n - 1 - i; ++j) t(i, j) = a(i, n - 1 - j);
  return t;
}

BruhatGenerator assemble_generator(const PrimeField& f, int n,
                                   std::vector<uint32_t> diag,
                                   const CREDecomposition& lower,
                                   const CREDecomposition& upper) {
  BruhatGenerator g;
  g.field = f;
  g.n = n;
  g.diag = std::move(diag);
  CompactTriple lo = compactify(lower, n);
  CompactTriple up = compactify(upper, n);
  g.CL = std::move(lo.c);
  g.EL = std::move(lo.e);
  g.RL = std::move(lo.perm);
  g.CU = std::move(up.c);
  g.EU = std::move(up.e);
  g.RU = std::move(up.perm);
  g.t = std::max(std::max(g.CL.overlap_depth(), g.EL.overlap_depth()),
                 std::max(g.CU.overlap_depth(), g.EU.overlap_depth()));
  return g;
}

}  // namespace

BruhatGenerator bruhat_from_dense(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("bruhat_from_dense: not square");
  const PrimeField& f = a.field();
  const int n = a.rows();
  std::vector<uint32_t> diag(size_t(n), 0);
  for (int i = 0; i < n; ++i) diag[i] = a(i, i);

  DenseLeftOracle lo(strict_lower_left(a));
  DenseLeftOracle uo(strict_upper_left(a));
  DenseMatrix none(f, n, 0);
  CREDecomposition lower = lbruhat_gen(lo, 0, 0, n, none, none, 32);
  CREDecomposition upper = lbruhat_gen(uo, 0, 0, n, none, none, 32);
  return assemble_generator(f, n, std::move(diag), lower, upper);
}

namespace {

// Dense Left(C*R*E) for compact factors.
DenseMatrix expand_left_triple(const PrimeField& f, int n,
                               const EchelonFactor& c,
                               const std::vector<int>& perm,
                               const EchelonFactor& e) {
  DenseMatrix m(f, n, n);
  for (int k = 0; k < c.count(); ++k) {
    const auto& crun = c.run[k];
    const auto& erun = e.run[perm[k]];
    const int p = c.pivot[k], q = e.pivot[perm[k]];
    for (size_t ci = 0; ci < crun.size(); ++ci) {
      if (crun[ci] == 0) continue;
      const int i = p + int(ci);
      uint32_t* row = m.row_ptr(i);
      const int jend = std::min(q + int(erun.size()) - 1, n - 2 - i);
      for (int j = q; j <= jend; ++j) {
        uint32_t ev = erun[size_t(j - q)];
        if (ev) row[j] = f.add(row[j], f.mul(crun[ci], ev));
      }
    }
  }
  return m;
}

}  // namespace

DenseMatrix bruhat_expand(const BruhatGenerator& g) {
  const PrimeField& f = g.field;
  const int n = g.n;
  DenseMatrix a(f, n, n);
  for (int i = 0; i < n; ++i) a(i, i) = g.diag[i];
  DenseMatrix lo = expand_left_triple(f, n, g.CL, g.RL, g.EL);
  a.add_in_place(reverse_rows(lo));
  DenseMatrix up = expand_left_triple(f, n, g.CU, g.RU, g.EU);
  a.add_in_place(reverse_cols(up));
  return a;
}

namespace {

// y += Left(C*R*E) * b.  Per pivot pair, a single backward sweep over the
// C run with a prefix accumulator over the E run: the running bound
// j <= n-2-i grows as i shrinks, so the prefix pointer only moves forward.
void apply_left_triple(const PrimeField& f, const EchelonFactor& c,
                       const std::vector<int>& perm, const EchelonFactor& e,
                       const DenseMatrix& b, DenseMatrix& y) {
  const int n = c.dim;
  const int v = b.cols();
  std::vector<uint32_t> acc(size_t(v), 0);
  for (int k = 0; k < c.count(); ++k) {
    const auto& crun = c.run[k];
    const auto& erun = e.run[perm[k]];
    const int p = c.pivot[k], q = e.pivot[perm[k]];
    std::fill(acc.begin(), acc.end(), 0);
    int pos = q - 1;  // last column folded into the prefix
    const int qlast = q + int(erun.size()) - 1;
    for (int ci = int(crun.size()) - 1; ci >= 0; --ci) {
      const int i = p + ci;
      const int jmax = std::min(n - 2 - i, qlast);
      while (pos < jmax) {
        ++pos;
        const uint32_t ev = erun[size_t(pos - q)];
        if (ev) {
          const uint32_t* brow = b.row_ptr(pos);
          for (int col = 0; col < v; ++col)
            acc[col] = f.add(acc[col], f.mul(ev, brow[col]));
        }
      }
      const uint32_t cv = crun[size_t(ci)];
      if (cv == 0 || pos < q) continue;
      uint32_t* yrow = y.row_ptr(i);
      for (int col = 0; col < v; ++col)
        yrow[col] = f.add(yrow[col], f.mul(cv, acc[col]));
    }
  }
}

}  // namespace

DenseMatrix bruhat_apply(const BruhatGenerator& g, const DenseMatrix& b,
                         const DenseMatrix& c) {
  if (b.rows() != g.n || c.rows() != g.n || c.cols() != b.cols())
    throw ShapeError("bruhat_apply: non-conformal dimensions");
  if (b.field() != g.field || c.field() != g.field)
    throw ShapeError("bruhat_apply: field mismatch");
  const PrimeField& f = g.field;
  const int v = b.cols();
  DenseMatrix out(c);
  for (int i = 0; i < g.n; ++i) {
    if (g.diag[i] == 0) continue;
    uint32_t* orow = out.row_ptr(i);
    const uint32_t* brow = b.row_ptr(i);
    for (int col = 0; col < v; ++col)
      orow[col] = f.add(orow[col], f.mul(g.diag[i], brow[col]));
  }
  // Lower part is J * Left(CL*RL*EL).
  DenseMatrix ylo(f, g.n, v);
  apply_left_triple(f, g.CL, g.RL, g.EL, b, ylo);
  DenseMatrix ylo_flip = reverse_rows(ylo);
  out.add_in_place(ylo_flip);
  // Upper part is Left(CU*RU*EU) * J.
  DenseMatrix yup(f, g.n, v);
  apply_left_triple(f, g.CU, g.RU, g.EU, reverse_rows(b), yup);
  out.add_in_place(yup);
  return out;
}

// ---------------------------------------------------------------------------
// Sparse construction path.

namespace {

// Materialized uniform random Toeplitz matrix (constant along diagonals).
DenseMatrix random_toeplitz(const PrimeField& f, int rows, int cols,
                            SeededRng& rng) {
  std::vector<uint32_t> d(size_t(rows) + cols - 1);
  for (auto& x : d) x = rng.uniform(f);
  DenseMatrix t(f, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t(i, j) = d[size_t(i - j + cols - 1)];
  return t;
}

DenseMatrix sp_matmul(const SparseMatrix& a, const DenseMatrix& b) {
  const PrimeField& f = b.field();
  DenseMatrix c(f, a.rows(), b.cols());
  for (const auto& en : a.entries()) {
    const uint32_t* brow = b.row_ptr(en.col);
    uint32_t* crow = c.row_ptr(en.row);
    for (int j = 0; j < b.cols(); ++j)
      crow[j] = f.add(crow[j], f.mul(en.val, brow[j]));
  }
  return c;
}

DenseMatrix matmul_sp(const DenseMatrix& a, const SparseMatrix& b) {
  const PrimeField& f = a.field();
  DenseMatrix c(f, a.rows(), b.cols());
  for (const auto& en : b.entries()) {
    for (int i = 0; i < a.rows(); ++i) {
      uint32_t av = a(i, en.row);
      if (av) c(i, en.col) = f.add(c(i, en.col), f.mul(av, en.val));
    }
  }
  return c;
}

std::vector<int> complement_of(const std::vector<int>& idx, int n) {
  std::vector<char> in(size_t(n), 0);
  for (int x : idx) in[x] = 1;
  std::vector<int> out;
  out.reserve(size_t(n) - idx.size());
  for (int i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

}  // namespace

std::pair<std::vector<int>, std::vector<int>> sparse_rank_profiles(
    const SparseMatrix& a, const DenseMatrix& g, const DenseMatrix& h, int s,
    SeededRng& rng) {
  const PrimeField& f = a.field();
  const int n = a.rows();
  const int w = std::min(s + g.cols(), std::min(a.rows(), a.cols()));
  if (w == 0) return {{}, {}};
  DenseMatrix t1 = random_toeplitz(f, a.cols(), w, rng);
  DenseMatrix t2 = random_toeplitz(f, w, n, rng);

  DenseMatrix p = sp_matmul(a, t1);  // (A - G*H^T) * T1
  if (g.cols() > 0) {
    DenseMatrix k = matmul(h.transposed(), t1);
    p.sub_in_place(matmul(g, k));
  }
  DenseMatrix q = matmul_sp(t2, a);  // T2 * (A - G*H^T)
  if (g.cols() > 0) {
    DenseMatrix l = matmul(t2, g);
    q.sub_in_place(matmul(l, h.transposed()));
  }
  return {rank_profiles(p).first, rank_profiles(q).second};
}

CREDecomposition sparse_cre(const SparseMatrix& a, const DenseMatrix& g,
                            const DenseMatrix& h, int s, SeededRng& rng) {
  const PrimeField& f = a.field();
  const int nr = a.rows(), nc = a.cols();
  auto [rrp, crp] = sparse_rank_profiles(a, g, h, s, rng);
  if (rrp.size() != crp.size())
    throw ProfileMismatch("sketched profile lengths disagree");
  const int r = int(rrp.size());

  auto corrected = [&](const std::vector<int>& rows,
                       const std::vector<int>& cols) {
    DenseMatrix m(f, int(rows.size()), int(cols.size()));
    std::vector<int> where(size_t(nc), -1);
    for (size_t j = 0; j < cols.size(); ++j) where[cols[j]] = int(j);
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t k = a.row_begin(rows[i]); k < a.row_end(rows[i]); ++k) {
        const auto& en = a.entries()[k];
        if (where[en.col] >= 0) m(int(i), where[en.col]) = en.val;
      }
    if (g.cols() > 0)
      m.sub_in_place(matmul(g.rows_at(rows), h.rows_at(cols).transposed()));
    return m;
  };

  DenseMatrix m11 = corrected(rrp, crp);
  CREDecomposition piv = cre(m11);
  if (piv.rank != r)
    throw ProfileMismatch("pivot block rank " + std::to_string(piv.rank) +
                          " != profile length " + std::to_string(r));

  std::vector<int> comp_r = complement_of(rrp, nr);
  std::vector<int> comp_c = complement_of(crp, nc);
  DenseMatrix m12 = corrected(rrp, comp_c);
  DenseMatrix m21 = corrected(comp_r, crp);
  DenseMatrix cs = trsm_lower(piv.C, m12);         // r x (nc - r)
  DenseMatrix ds = trsm_upper_right(m21, piv.E);   // (nr - r) x r

  CREDecomposition out;
  out.rank = r;
  out.perm = piv.perm;
  out.pivot_rows = rrp;
  out.pivot_cols = crp;
  out.C = DenseMatrix(f, nr, r);
  out.E = DenseMatrix(f, r, nc);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < r; ++k) out.C(rrp[i], k) = piv.C(i, k);
  for (size_t i = 0; i < comp_r.size(); ++i)
    for (int k = 0; k < r; ++k)
      out.C(comp_r[i], k) = ds(int(i), piv.perm[k]);
  for (int j = 0; j < r; ++j)
    for (int k = 0; k < r; ++k) out.E(j, crp[k]) = piv.E(j, k);
  std::vector<int> inv(size_t(r), 0);
  for (int k = 0; k < r; ++k) inv[piv.perm[k]] = k;
  for (int j = 0; j < r; ++j)
    for (size_t cidx = 0; cidx < comp_c.size(); ++cidx)
      out.E(j, comp_c[cidx]) = cs(inv[j], int(cidx));
  return out;
}

namespace {

class SparseLeftOracle final : public LeftOracle {
 public:
  SparseLeftOracle(const SparseMatrix& op, int s, SeededRng rng, int retries)
      : op_(op), s_(s), rng_(rng), retries_(retries) {}
  int n() const override { return op_.rows(); }

  CREDecomposition bbcre(int r0, int c0, int mr, int mc, const DenseMatrix& g,
                         const DenseMatrix& h) override {
    const int nn = n();
    const bool fully_live = (r0 + mr - 1) + (c0 + mc - 1) <= nn - 2;
    if (fully_live && mr > 0 && mc > 0) {
      SparseMatrix blk = op_.sub_block(r0, r0 + mr, c0, c0 + mc);
      for (int attempt = 0; attempt <= retries_; ++attempt) {
        try {
          return sparse_cre(blk, g, h, s_, rng_);
        } catch (const ProfileMismatch&) {
          ++mismatches_;
        }
      }
      throw MonteCarloFailure(
          "sparse rank-profile sketch failed " +
          std::to_string(retries_ + 1) + " times");
    }
    // Base-case block spans the anti-diagonal: densify and eliminate
    // within the left triangle.
    DenseMatrix m = op_.rows_slice(range_vec(r0, mr), c0, c0 + mc);
    if (g.cols() > 0) m.sub_in_place(matmul(g, h.transposed()));
    return left_restricted_cre(std::move(m), nn - 2 - r0 - c0);
  }

  DenseMatrix rows_slice(const std::vector<int>& rows, int c0,
                         int c1) const override {
    return op_.rows_slice(rows, c0, c1);
  }
  DenseMatrix cols_slice(int r0, int r1,
                         const std::vector<int>& cols) const override {
    return op_.cols_slice(r0, r1, cols);
  }

  int mismatches() const { return mismatches_; }

 private:
  static std::vector<int> range_vec(int lo, int len) {
    std::vector<int> v(size_t(len), 0);
    std::iota(v.begin(), v.end(), lo);
    return v;
  }

  const SparseMatrix& op_;
  int s_;
  SeededRng rng_;
  int retries_;
  int mismatches_ = 0;
};

SparseMatrix sparse_left_lower(const SparseMatrix& a) {
  SparseMatrix t(a.field(), a.rows(), a.cols());
  const int n = a.rows();
  for (const auto& en : a.entries())
    if (en.row > en.col) t.add_entry(n - 1 - en.row, en.col, en.val);
  t.finalize();
  return t;
}

SparseMatrix sparse_left_upper(const SparseMatrix& a) {
  SparseMatrix t(a.field(), a.rows(), a.cols());
  const int n = a.rows();
  for (const auto& en : a.entries())
    if (en.row < en.col) t.add_entry(en.row, n - 1 - en.col, en.val);
  t.finalize();
  return t;
}

}  // namespace

BruhatGenerator bruhat_from_sparse(const SparseMatrix& a, int s,
                                   uint64_t seed, int retries) {
  if (a.rows() != a.cols()) throw ShapeError("bruhat_from_sparse: not square");
  const PrimeField& f = a.field();
  const int n = a.rows();
  std::vector<uint32_t> diag(size_t(n), 0);
  for (const auto& en : a.entries())
    if (en.row == en.col) diag[en.row] = en.val;

  const int thr = std::max(2 * s, 32);
  SeededRng rng(seed);
  SparseMatrix tl = sparse_left_lower(a);
  SparseMatrix tu = sparse_left_upper(a);
  SparseLeftOracle lo(tl, s, rng.split(0x10f2c), retries);
  SparseLeftOracle uo(tu, s, rng.split(0x2e8d51), retries);
  DenseMatrix none(f, n, 0);
  CREDecomposition lower = lbruhat_gen(lo, 0, 0, n, none, none, thr);
  CREDecomposition upper = lbruhat_gen(uo, 0, 0, n, none, none, thr);
  return assemble_generator(f, n, std::move(diag), lower, upper);
}

// ---------------------------------------------------------------------------
// Sum path.

CREDecomposition bruhat_sum_cre(const FactoredSlice& a,
                                const FactoredSlice& b, const DenseMatrix& g,
                                const DenseMatrix& h) {
  const PrimeField& f = g.field();
  const int mr = a.C.rows(), mc = a.E.cols();
  if (b.C.rows() != mr || b.E.cols() != mc || g.rows() != mr ||
      h.rows() != mc)
    throw ShapeError("bruhat_sum_cre: non-conformal operands");
  const int ra = a.C.cols(), rb = b.C.cols(), t = g.cols();
  const int q = ra + rb + t;

  DenseMatrix ustack(f, mr, q);
  ustack.set_block(0, 0, a.C);
  ustack.set_block(0, ra, b.C);
  ustack.set_block(0, ra + rb, g);
  DenseMatrix wstack(f, q, mc);
  for (int k = 0; k < ra; ++k)
    std::copy_n(a.E.row_ptr(a.perm[k]), mc, wstack.row_ptr(k));
  for (int k = 0; k < rb; ++k)
    std::copy_n(b.E.row_ptr(b.perm[k]), mc, wstack.row_ptr(ra + k));
  for (int k = 0; k < t; ++k)
    for (int j = 0; j < mc; ++j) wstack(ra + rb + k, j) = f.neg(h(j, k));

  CREDecomposition dl = cre(ustack);
  CREDecomposition dr = cre(wstack);

  // X = (RL*EL) * (CR*RR)
  DenseMatrix rl_el(f, dl.rank, q);
  for (int k = 0; k < dl.rank; ++k)
    std::copy_n(dl.E.row_ptr(dl.perm[k]), q, rl_el.row_ptr(k));
  DenseMatrix cr_rr(f, q, dr.rank);
  for (int k = 0; k < dr.rank; ++k)
    for (int i = 0; i < q; ++i) cr_rr(i, dr.perm[k]) = dr.C(i, k);
  CREDecomposition dx = cre(matmul(rl_el, cr_rr));

  CREDecomposition out;
  out.rank = dx.rank;
  out.perm = dx.perm;
  out.C = matmul(dl.C, dx.C);
  out.E = matmul(dx.E, dr.E);
  out.pivot_rows.resize(size_t(dx.rank));
  out.pivot_cols.resize(size_t(dx.rank));
  for (int k = 0; k < dx.rank; ++k) {
    int i = 0;
    while (i < out.C.rows() && out.C(i, k) == 0) ++i;
    out.pivot_rows[k] = i;
    int j = 0;
    while (j < out.E.cols() && out.E(k, j) == 0) ++j;
    out.pivot_cols[k] = j;
  }
  check_echelon_pivots(out.pivot_rows, "sum C");
  check_echelon_pivots(out.pivot_cols, "sum E");
  return out;
}

namespace {

// One triangle of a factored sum.  Holds densified factors plus the column
// support windows needed to restrict slices to the relevant pivots.
struct SumSide {
  DenseMatrix c;           // n x u
  std::vector<int> perm;
  DenseMatrix e;           // u x n
  std::vector<int> c_lo, c_hi;  // row window of each C column
  std::vector<int> e_lo, e_hi;  // column window of each E row
};

SumSide make_side(const PrimeField& f, const EchelonFactor& cf,
                  const std::vector<int>& perm, const EchelonFactor& ef) {
  SumSide s;
  s.c = cf.to_dense(f);
  s.e = ef.to_dense(f).transposed();
  s.perm = perm;
  const int u = cf.count();
  s.c_lo.resize(u);
  s.c_hi.resize(u);
  s.e_lo.resize(u);
  s.e_hi.resize(u);
  for (int k = 0; k < u; ++k) {
    s.c_lo[k] = cf.pivot[k];
    s.c_hi[k] = cf.pivot[k] + int(cf.run[k].size()) - 1;
  }
  for (int j = 0; j < u; ++j) {
    s.e_lo[j] = ef.pivot[j];
    s.e_hi[j] = ef.pivot[j] + int(ef.run[j].size()) - 1;
  }
  return s;
}

class SumLeftOracle final : public LeftOracle {
 public:
  SumLeftOracle(const PrimeField& f, int n, SumSide a, SumSide b)
      : f_(f), n_(n), a_(std::move(a)), b_(std::move(b)) {}
  int n() const override { return n_; }

  CREDecomposition bbcre(int r0, int c0, int mr, int mc, const DenseMatrix& g,
                         const DenseMatrix& h) override {
    const bool fully_live = (r0 + mr - 1) + (c0 + mc - 1) <= n_ - 2;
    if (fully_live) {
      return bruhat_sum_cre(slice(a_, r0, c0, mr, mc),
                            slice(b_, r0, c0, mr, mc), g, h);
    }
    DenseMatrix m = materialize(r0, c0, mr, mc);
    if (g.cols() > 0) m.sub_in_place(matmul(g, h.transposed()));
    return left_restricted_cre(std::move(m), n_ - 2 - r0 - c0);
  }

  DenseMatrix rows_slice(const std::vector<int>& rows, int c0,
                         int c1) const override {
    DenseMatrix out(f_, int(rows.size()), c1 - c0);
    accumulate_rows(a_, rows, c0, c1, out);
    accumulate_rows(b_, rows, c0, c1, out);
    // The raw operand is the left-triangular sum itself.
    for (size_t i = 0; i < rows.size(); ++i)
      for (int j = 0; j < c1 - c0; ++j)
        if (rows[i] + (c0 + j) > n_ - 2) out(int(i), j) = 0;
    return out;
  }

  DenseMatrix cols_slice(int r0, int r1,
                         const std::vector<int>& cols) const override {
    DenseMatrix out(f_, r1 - r0, int(cols.size()));
    accumulate_cols(a_, r0, r1, cols, out);
    accumulate_cols(b_, r0, r1, cols, out);
    for (int i = 0; i < r1 - r0; ++i)
      for (size_t j = 0; j < cols.size(); ++j)
        if ((r0 + i) + cols[j] > n_ - 2) out(i, int(j)) = 0;
    return out;
  }

 private:
  // Relevant pivots of one side for a block: both support windows must
  // meet the block's ranges.
  FactoredSlice slice(const SumSide& s, int r0, int c0, int mr,
                      int mc) const {
    std::vector<int> keep;
    for (int k = 0; k < s.c.cols(); ++k) {
      int j = s.perm[k];
      if (s.c_hi[k] < r0 || s.c_lo[k] >= r0 + mr) continue;
      if (s.e_hi[j] < c0 || s.e_lo[j] >= c0 + mc) continue;
      keep.push_back(k);
    }
    std::vector<int> erows(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) erows[i] = s.perm[keep[i]];
    std::vector<int> sorted_erows(erows);
    std::sort(sorted_erows.begin(), sorted_erows.end());

    FactoredSlice out;
    out.C = DenseMatrix(f_, mr, int(keep.size()));
    for (size_t kk = 0; kk < keep.size(); ++kk)
      for (int i = 0; i < mr; ++i) out.C(i, int(kk)) = s.c(r0 + i, keep[kk]);
    out.E = DenseMatrix(f_, int(keep.size()), mc);
    for (size_t jj = 0; jj < sorted_erows.size(); ++jj)
      for (int j = 0; j < mc; ++j)
        out.E(int(jj), j) = s.e(sorted_erows[jj], c0 + j);
    out.perm.resize(keep.size());
    for (size_t kk = 0; kk < keep.size(); ++kk) {
      auto it = std::lower_bound(sorted_erows.begin(), sorted_erows.end(),
                                 erows[kk]);
      out.perm[kk] = int(it - sorted_erows.begin());
    }
    return out;
  }

  DenseMatrix materialize(int r0, int c0, int mr, int mc) const {
    std::vector<int> rows(size_t(mr), 0);
    std::iota(rows.begin(), rows.end(), r0);
    return rows_slice(rows, c0, c0 + mc);
  }

  void accumulate_rows(const SumSide& s, const std::vector<int>& rows, int c0,
                       int c1, DenseMatrix& out) const {
    for (int k = 0; k < s.c.cols(); ++k) {
      int j = s.perm[k];
      if (s.e_hi[j] < c0 || s.e_lo[j] >= c1) continue;
      for (size_t ri = 0; ri < rows.size(); ++ri) {
        uint32_t cv = s.c(rows[ri], k);
        if (cv == 0) continue;
        const int jlo = std::max(c0, s.e_lo[j]);
        const int jhi = std::min(c1 - 1, s.e_hi[j]);
        for (int jj = jlo; jj <= jhi; ++jj) {
          uint32_t ev = s.e(j, jj);
          if (ev)
            out(int(ri), jj - c0) =
                f_.add(out(int(ri), jj - c0), f_.mul(cv, ev));
        }
      }
    }
  }

  void accumulate_cols(const SumSide& s, int r0, int r1,
                       const std::vector<int>& cols, DenseMatrix& out) const {
    for (int k = 0; k < s.c.cols(); ++k) {
      int j = s.perm[k];
      if (s.c_hi[k] < r0 || s.c_lo[k] >= r1) continue;
      const int ilo = std::max(r0, s.c_lo[k]);
      const int ihi = std::min(r1 - 1, s.c_hi[k]);
      for (size_t cj = 0; cj < cols.size(); ++cj) {
        uint32_t ev = s.e(j, cols[cj]);
        if (ev == 0) continue;
        for (int i = ilo; i <= ihi; ++i) {
          uint32_t cv = s.c(i, k);
          if (cv)
            out(i - r0, int(cj)) =
                f_.add(out(i - r0, int(cj)), f_.mul(cv, ev));
        }
      }
    }
  }

  PrimeField f_;
  int n_;
  SumSide a_, b_;
};

}  // namespace

BruhatGenerator bruhat_add(const BruhatGenerator& ga,
                           const BruhatGenerator& gb) {
  if (ga.n != gb.n || ga.field != gb.field)
    throw ShapeError("bruhat_add: dimension or field mismatch");
  const PrimeField& f = ga.field;
  const int n = ga.n;
  std::vector<uint32_t> diag(size_t(n), 0);
  for (int i = 0; i < n; ++i) diag[i] = f.add(ga.diag[i], gb.diag[i]);

  const int thr = std::max(2 * (ga.t + gb.t), 32);
  DenseMatrix none(f, n, 0);
  SumLeftOracle lo(f, n, make_side(f, ga.CL, ga.RL, ga.EL),
                   make_side(f, gb.CL, gb.RL, gb.EL));
  CREDecomposition lower = lbruhat_gen(lo, 0, 0, n, none, none, thr);
  SumLeftOracle uo(f, n, make_side(f, ga.CU, ga.RU, ga.EU),
                   make_side(f, gb.CU, gb.RU, gb.EU));
  CREDecomposition upper = lbruhat_gen(uo, 0, 0, n, none, none, thr);
  return assemble_generator(f, n, std::move(diag), lower, upper);
}

}  // namespace qsep
