#pragma once

#include <vector>

#include "qsep/dense.hpp"

namespace qsep {

/// Hierarchically semiseparable generator on a uniform depth-K binary tree
/// with 2^K leaf blocks of size t.  The input is zero-padded up to the next
/// n_pad = t*2^K and the expansion truncated back, so the tree is always
/// uniform.  Inner dimensions are actual ranks, bounded by t.
///
/// Level-k data (k = 1..K, node i = 0..2^k-1):
///   row transitions R[k][i]   (rank_r[k][i] x rank_r[k-1][i/2]), k >= 2
///   col transitions W[k][i]   (rank_c[k-1][i/2] x rank_c[k][i]), k >= 2
///   couplings       B[k][i]   (rank_r[k][i] x rank_c[k][sibling(i)])
/// Leaf data: D[i] (t x t), Uleaf[i] (t x rank_r[K][i]),
/// Vleaf[i] (rank_c[K][i] x t).
///
/// The off-diagonal block joining siblings (2i, 2i+1) at level k expands to
/// Uagg[k][2i] * B[k][2i] * Vagg[k][2i+1] (and transposed roles for the
/// block below), where Uagg/Vagg are the recursive aggregates
///   Uagg[k][i] = [Uagg[k+1][2i]*R[k+1][2i] ; Uagg[k+1][2i+1]*R[k+1][2i+1]],
///   Vagg[k][i] = [W[k+1][2i]*Vagg[k+1][2i] | W[k+1][2i+1]*Vagg[k+1][2i+1]].
struct HSSGenerator {
  PrimeField field = PrimeField::unchecked(3);
  int n = 0;      // represented size
  int n_pad = 0;  // t * 2^K
  int t = 0;
  int K = 0;
  std::vector<DenseMatrix> D;
  std::vector<DenseMatrix> Uleaf;
  std::vector<DenseMatrix> Vleaf;
  std::vector<std::vector<DenseMatrix>> R;  // R[k] valid for k in [2, K]
  std::vector<std::vector<DenseMatrix>> W;  // same levels as R
  std::vector<std::vector<DenseMatrix>> B;  // B[k] valid for k in [1, K]

  int leaves() const { return 1 << K; }
  size_t storage() const;
  void validate() const;  // tree and chained-dimension invariants
};

/// Build a t-HSS generator; requires qs_order(a) <= t/2.  A factorization
/// of rank > t at level k, node i throws OrderExceeded(k, i) -- this is the
/// detection mechanism for t below twice the quasiseparable order.
HSSGenerator hss_from_dense(const DenseMatrix& a, int t);

DenseMatrix hss_expand(const HSSGenerator& g);

/// c + expand(g)*b via the upward V-sweep, coupling, and downward U-sweep.
DenseMatrix hss_apply(const HSSGenerator& g, const DenseMatrix& b,
                      const DenseMatrix& c);

}  // namespace qsep
