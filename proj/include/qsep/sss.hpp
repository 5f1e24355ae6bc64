#pragma once

#include <vector>

#include "qsep/dense.hpp"

namespace qsep {

/// Sequentially semiseparable generator on the uniform grid of N = ceil(n/t)
/// diagonal blocks (the last block may be smaller).  Inner ranks are the
/// actual ranks of the off-diagonal chunks, not padded to t.
///
/// Block (i,j) of the represented matrix expands (0-based) to
///   P[i]*R[i-1]*...*R[j+1]*Q[j]   below the diagonal,
///   D[i]                          on it,
///   U[i]*W[i+1]*...*W[j-1]*V[j]   above it,
/// with empty chain products equal to the identity.
struct SSSGenerator {
  PrimeField field = PrimeField::unchecked(3);
  int n = 0;
  int t = 0;
  int N = 0;
  std::vector<int> lrank;  // lrank[k], k in [0, N-2]: lower rank at cut k
  std::vector<int> urank;  // upper ranks, same indexing
  std::vector<DenseMatrix> D;  // D[i], i in [0, N)
  std::vector<DenseMatrix> P;  // P[i]: bs(i) x lrank[i-1], i in [1, N)
  std::vector<DenseMatrix> Q;  // Q[i]: lrank[i] x bs(i), i in [0, N-1)
  std::vector<DenseMatrix> R;  // R[i]: lrank[i] x lrank[i-1], i in [1, N-1)
  std::vector<DenseMatrix> U;  // U[i]: bs(i) x urank[i], i in [0, N-1)
  std::vector<DenseMatrix> W;  // W[i]: urank[i-1] x urank[i], i in [1, N-1)
  std::vector<DenseMatrix> V;  // V[i]: urank[i-1] x bs(i), i in [1, N)

  int block_size(int i) const { return i + 1 < N ? t : n - (N - 1) * t; }
  int block_start(int i) const { return i * t; }
  // Ranks with the boundary convention l_{-1} = l_{N-1} = 0.
  int lr(int k) const { return (k < 0 || k >= N - 1) ? 0 : lrank[k]; }
  int ur(int k) const { return (k < 0 || k >= N - 1) ? 0 : urank[k]; }

  // Accessors that return correctly shaped empty blocks outside the stored
  // ranges, so chain formulas need no boundary cases.
  DenseMatrix matP(int i) const;
  DenseMatrix matQ(int i) const;
  DenseMatrix matR(int i) const;
  DenseMatrix matU(int i) const;
  DenseMatrix matW(int i) const;
  DenseMatrix matV(int i) const;

  /// Total stored field elements across all blocks.
  size_t storage() const;
  void validate() const;  // chained-dimension invariants
};

/// Same data layout with inner ranks up to 2t (the concatenated form an
/// addition or product produces before compression).
using SSSWideGenerator = SSSGenerator;

/// Build a t-SSS generator; requires qs_order(a) <= t, detected lazily:
/// a factorization step of rank > t throws OrderExceeded(k).
SSSGenerator sss_from_dense(const DenseMatrix& a, int t);

/// The unique matrix the generator represents.
DenseMatrix sss_expand(const SSSGenerator& g);

/// c + expand(g)*b without expanding g; b is sliced internally into column
/// panels of at most t.
DenseMatrix sss_apply(const SSSGenerator& g, const DenseMatrix& b,
                      const DenseMatrix& c);

/// Block concatenation of two same-grid generators; expands to the sum.
SSSWideGenerator sss_concat(const SSSGenerator& gb, const SSSGenerator& gc);

/// Pairs up consecutive blocks: block size doubles, N halves (odd N treats
/// the missing partner as a 0 x 0 block).  Expansion is preserved exactly.
SSSGenerator sss_compress(const SSSWideGenerator& g);

/// Sum on the same grid: concatenation followed by compression (block 2t).
SSSGenerator sss_add(const SSSGenerator& gb, const SSSGenerator& gc);

/// Product on the same grid via the two accumulator sweeps (block 2t).
SSSGenerator sss_mul(const SSSGenerator& ga, const SSSGenerator& gb);

/// Identity / zero generators on the given grid (empty families).
SSSGenerator sss_identity(const PrimeField& f, int n, int t);
SSSGenerator sss_zero(const PrimeField& f, int n, int t);

}  // namespace qsep
