#pragma once

#include <memory>
#include <vector>

#include "qsep/sparse.hpp"

namespace qsep {

/// Keeps entry (i,j) iff i + j <= n (1-based), i.e. strictly above the main
/// anti-diagonal plus nothing on it beyond the bound; 0-based: i + j <= n-2.
DenseMatrix left_part(const DenseMatrix& a);

/// Anti-identity product J*A (reverses rows).
DenseMatrix reverse_rows(const DenseMatrix& a);
/// A*J (reverses columns).
DenseMatrix reverse_cols(const DenseMatrix& a);

/// Column-echelon factor stored as one value run per column, from the pivot
/// row to the last (structurally useful) nonzero.  Also used transposed for
/// row-echelon factors.  Stored elements are field residues only.
struct EchelonFactor {
  int dim = 0;                            // column length
  std::vector<int> pivot;                 // strictly increasing
  std::vector<std::vector<uint32_t>> run; // run[k][0] sits at row pivot[k]

  int count() const { return int(pivot.size()); }
  size_t storage() const;
  DenseMatrix to_dense(const PrimeField& f) const;  // dim x count
  /// Largest number of column support intervals covering one row; a factor
  /// is t-overlapping exactly when this is <= t.
  int overlap_depth() const;
};

/// A = D + J*Left(CL*RL*EL) + Left(CU*RU*EU)*J.  RL/RU are permutations
/// stored as pairing vectors: C column k goes with E row perm[k].  EL/EU are
/// row-echelon factors stored transposed (as column runs of E^T).
struct BruhatGenerator {
  PrimeField field = PrimeField::unchecked(3);
  int n = 0;
  std::vector<uint32_t> diag;
  EchelonFactor CL, EL, CU, EU;
  std::vector<int> RL, RU;
  int t = 0;  // measured overlapping parameter of the four factors

  size_t storage() const;  // n + stored factor elements
};

/// Access interface for the left-triangular operand of lbruhat_gen.  The
/// operand is n() x n(), left triangular; slices return raw operand values.
/// bbcre returns a CRE decomposition of Left(raw[block] - G*H^T) where the
/// Left truncation acts at the operand's global anti-diagonal (a no-op for
/// fully live blocks, which is the only case the fast paths must handle).
class LeftOracle {
 public:
  virtual ~LeftOracle() = default;
  virtual int n() const = 0;
  virtual CREDecomposition bbcre(int r0, int c0, int mr, int mc,
                                 const DenseMatrix& g,
                                 const DenseMatrix& h) = 0;
  virtual DenseMatrix rows_slice(const std::vector<int>& rows, int c0,
                                 int c1) const = 0;
  virtual DenseMatrix cols_slice(int r0, int r1,
                                 const std::vector<int>& cols) const = 0;
};

/// Generic Crout-scheme generator for the m x m sub-operand at offsets
/// (row_off, col_off), with the delayed Schur correction G*H^T threaded
/// through.  Returns C, R, E with Left(C*R*E) = Left(operand - Left(G*H^T))
/// restricted to the block; C column echelon, E row echelon.
CREDecomposition lbruhat_gen(LeftOracle& oracle, int row_off, int col_off,
                             int m, const DenseMatrix& g,
                             const DenseMatrix& h, int base_threshold);

/// Dense-oracle construction of the full generator.
BruhatGenerator bruhat_from_dense(const DenseMatrix& a);

DenseMatrix bruhat_expand(const BruhatGenerator& g);

/// c + expand(g)*b without expanding, in O(n * t * cols(b)) field ops.
DenseMatrix bruhat_apply(const BruhatGenerator& g, const DenseMatrix& b,
                         const DenseMatrix& c);

/// Monte Carlo row/column rank profiles of A - G*H^T via Toeplitz sketches
/// of width s + cols(G); correct with probability >= 1 - 2(s+t)/p.
std::pair<std::vector<int>, std::vector<int>> sparse_rank_profiles(
    const SparseMatrix& a, const DenseMatrix& g, const DenseMatrix& h, int s,
    SeededRng& rng);

/// CRE of A - G*H^T for sparse A with rank(A - G*H^T) <= s, built from the
/// sketched profiles, one dense CRE of the pivot block and two TRSMs.
/// Throws ProfileMismatch when the pivot block contradicts the sketch.
CREDecomposition sparse_cre(const SparseMatrix& a, const DenseMatrix& g,
                            const DenseMatrix& h, int s, SeededRng& rng);

/// Sparse-oracle construction; s bounds the quasiseparable order of a.
/// Each failed sparse_cre is retried (default 3 times) with fresh
/// randomness before MonteCarloFailure is raised.
BruhatGenerator bruhat_from_sparse(const SparseMatrix& a, int s,
                                   uint64_t seed, int retries = 3);

/// Operand slice of a factored sum, C*R*E with the permutation given as a
/// pairing vector (not necessarily echelon: slices of echelon factors).
struct FactoredSlice {
  DenseMatrix C;
  std::vector<int> perm;
  DenseMatrix E;
};

/// CRE of A + B - G*H^T for operands in factored form, via three dense CREs.
CREDecomposition bruhat_sum_cre(const FactoredSlice& a,
                                const FactoredSlice& b, const DenseMatrix& g,
                                const DenseMatrix& h);

/// Sum of two generators of possibly different orders via lbruhat_gen with
/// the factored-sum oracle, run once per triangle.
BruhatGenerator bruhat_add(const BruhatGenerator& ga,
                           const BruhatGenerator& gb);

}  // namespace qsep
