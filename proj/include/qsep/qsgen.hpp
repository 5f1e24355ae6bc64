#pragma once

#include <optional>

#include "qsep/sparse.hpp"

namespace qsep {

/// Smallest s such that every submatrix strictly below or strictly above
/// the diagonal split at any index has rank at most s.  Computes 2(n-1)
/// ranks naively; meant as a test oracle, not a fast path.
int qs_order(const DenseMatrix& a);

/// A generated test instance together with its declared order.
struct QsInstance {
  int n = 0;
  int s = 0;
  uint64_t seed = 0;
  bool is_dense = true;
  DenseMatrix dense;
  SparseMatrix sparse;
};

/// Random diagonal + strictly-lower rank-s + strictly-upper rank-s matrix.
DenseMatrix random_qs_dense(const PrimeField& f, int n, int s,
                            SeededRng& rng);

/// Sparse instance of order <= s: a random diagonal plus low-rank parts
/// supported on s random rows (lower) and s random columns (upper), filled
/// to approximately density*n^2 entries.
SparseMatrix random_qs_sparse(const PrimeField& f, int n, int s,
                              double density, SeededRng& rng);

/// density == nullopt builds a dense instance.
QsInstance random_qs(const PrimeField& f, int n, int s,
                     std::optional<double> density, SeededRng& rng);

}  // namespace qsep
