#include "qsep/qsgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qsep {

int qs_order(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("qs_order: matrix not square");
  const int n = a.rows();
  int s = 0;
  for (int k = 1; k < n; ++k) {
    s = std::max(s, rank_of(a.block(0, k, k, n - k)));
    s = std::max(s, rank_of(a.block(k, 0, n - k, k)));
  }
  return s;
}

DenseMatrix random_qs_dense(const PrimeField& f, int n, int s,
                            SeededRng& rng) {
  if (s < 0 || s > n) throw ParamError("random_qs: need 0 <= s <= n");
  DenseMatrix a(f, n, n);
  for (int i = 0; i < n; ++i) a(i, i) = rng.uniform(f);
  if (s > 0) {
    DenseMatrix x = DenseMatrix::random(f, n, s, rng);
    DenseMatrix y = DenseMatrix::random(f, s, n, rng);
    DenseMatrix low = matmul(x, y);
    DenseMatrix u = DenseMatrix::random(f, n, s, rng);
    DenseMatrix v = DenseMatrix::random(f, s, n, rng);
    DenseMatrix up = matmul(u, v);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) a(i, j) = low(i, j);
      for (int j = i + 1; j < n; ++j) a(i, j) = up(i, j);
    }
  }
  return a;
}

namespace {

// k distinct values from [lo, hi), deterministic given the rng stream.
std::vector<int> sample_distinct(int lo, int hi, int k, SeededRng& rng) {
  std::vector<int> pool(size_t(hi - lo), 0);
  std::iota(pool.begin(), pool.end(), lo);
  for (int i = 0; i < k; ++i) {
    size_t j = i + size_t(rng.uniform_below(uint64_t(pool.size() - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(size_t(k));
  return pool;
}

}  // namespace

SparseMatrix random_qs_sparse(const PrimeField& f, int n, int s,
                              double density, SeededRng& rng) {
  if (s < 0 || s > n) throw ParamError("random_qs: need 0 <= s <= n");
  if (density < 0.0 || density > 1.0)
    throw ParamError("random_qs: density must be in [0, 1]");
  SparseMatrix a(f, n, n);
  size_t target = size_t(std::llround(density * double(n) * double(n)));

  size_t diag = std::min<size_t>(target, size_t(n));
  for (size_t i = 0; i < diag; ++i)
    a.add_entry(int(i), int(i), rng.uniform_nonzero(f));
  size_t rest = target - diag;

  // The strict triangles each get their fill confined to s random rows
  // (lower) / columns (upper), which caps every off-diagonal rank at s.
  size_t lower_fill = rest / 2, upper_fill = rest - rest / 2;
  if (s > 0 && n > 1) {
    std::vector<int> rows = sample_distinct(1, n, std::min(s, n - 1), rng);
    std::vector<int> cols = sample_distinct(1, n, std::min(s, n - 1), rng);
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());

    auto fill_lines = [&](const std::vector<int>& lines, size_t want,
                          bool lower) {
      size_t capacity = 0;
      for (int ln : lines) capacity += size_t(ln);
      want = std::min(want, capacity);
      size_t placed = 0;
      for (size_t li = 0; li < lines.size() && placed < want; ++li) {
        int ln = lines[li];
        size_t remaining_cap = 0;
        for (size_t lj = li; lj < lines.size(); ++lj)
          remaining_cap += size_t(lines[lj]);
        // Spread the remaining quota proportionally to line length.
        size_t quota = std::min<size_t>(
            size_t(ln), (want - placed) * size_t(ln) / remaining_cap + 1);
        quota = std::min(quota, want - placed);
        std::vector<int> at = sample_distinct(0, ln, int(quota), rng);
        for (int pos : at) {
          uint32_t v = rng.uniform_nonzero(f);
          if (lower)
            a.add_entry(ln, pos, v);
          else
            a.add_entry(pos, ln, v);
        }
        placed += quota;
      }
    };
    fill_lines(rows, lower_fill, true);
    fill_lines(cols, upper_fill, false);
  }
  a.finalize();
  return a;
}

QsInstance random_qs(const PrimeField& f, int n, int s,
                     std::optional<double> density, SeededRng& rng) {
  QsInstance inst;
  inst.n = n;
  inst.s = s;
  inst.seed = rng.seed();
  if (density) {
    inst.is_dense = false;
    inst.sparse = random_qs_sparse(f, n, s, *density, rng);
  } else {
    inst.is_dense = true;
    inst.dense = random_qs_dense(f, n, s, rng);
  }
  return inst;
}

}  // namespace qsep
