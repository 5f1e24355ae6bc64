#include <set>

#include "doctest.h"
#include "qsep/bruhat.hpp"
#include "qsep/qsgen.hpp"

using namespace qsep;

namespace {

const PrimeField kF(131071);

// t-overlapping predicate straight from the definition: among any t+1
// support intervals, one's leading index lies past another's trailing one.
// Equivalent to: no point is covered by more than t intervals.
bool is_t_overlapping(const EchelonFactor& fac, int t) {
  return fac.overlap_depth() <= t;
}

BruhatGenerator negated_gen(const BruhatGenerator& g) {
  BruhatGenerator n = g;
  for (auto& d : n.diag) d = kF.neg(d);
  for (auto& r : n.CL.run)
    for (auto& x : r) x = kF.neg(x);
  for (auto& r : n.CU.run)
    for (auto& x : r) x = kF.neg(x);
  return n;
}

}  // namespace

TEST_CASE("left_part") {
  SUBCASE("2x2 keeps only the top-left entry") {
    DenseMatrix a(kF, 2, 2);
    a(0, 0) = 1;
    a(0, 1) = 2;
    a(1, 0) = 3;
    a(1, 1) = 4;
    DenseMatrix l = left_part(a);
    CHECK(l(0, 0) == 1);
    CHECK(l(0, 1) == 0);
    CHECK(l(1, 0) == 0);
    CHECK(l(1, 1) == 0);
  }
  SUBCASE("1x1 is zeroed") {
    DenseMatrix a(kF, 1, 1);
    a(0, 0) = 9;
    CHECK(left_part(a).is_zero());
  }
  SUBCASE("idempotent projection") {
    SeededRng rng(60);
    DenseMatrix a = DenseMatrix::random(kF, 9, 9, rng);
    CHECK(left_part(left_part(a)) == left_part(a));
  }
  SUBCASE("J * left_part is strictly lower triangular") {
    SeededRng rng(61);
    DenseMatrix a = DenseMatrix::random(kF, 8, 8, rng);
    DenseMatrix jl = reverse_rows(left_part(a));
    for (int i = 0; i < 8; ++i)
      for (int j = i; j < 8; ++j) CHECK(jl(i, j) == 0);
  }
}

TEST_CASE("lbruhat_gen contract on random left-triangular operands") {
  SeededRng rng(62);
  for (int it = 0; it < 12; ++it) {
    int n = 24 + int(rng.uniform_below(140));
    int s = 1 + int(rng.uniform_below(5));
    SeededRng gen_rng = rng.split(700 + it);
    DenseMatrix a = random_qs_dense(kF, n, s, gen_rng);
    // Left-triangularized strictly-lower part.
    DenseMatrix t(kF, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n - 1 - i; ++j) t(i, j) = a(n - 1 - i, j);
    BruhatGenerator g = bruhat_from_dense(a);
    DenseMatrix cl = g.CL.to_dense(kF);
    DenseMatrix el = g.EL.to_dense(kF).transposed();
    DenseMatrix prod(kF, n, n);
    for (int k = 0; k < g.CL.count(); ++k)
      for (int i = 0; i < n; ++i) {
        if (cl(i, k) == 0) continue;
        for (int j = 0; j < n; ++j)
          prod(i, j) = kF.add(prod(i, j), kF.mul(cl(i, k), el(g.RL[k], j)));
      }
    CHECK(left_part(prod) == t);
  }
}

TEST_CASE("bruhat_from_dense roundtrip and factor predicates") {
  SeededRng rng(63);
  SUBCASE("diagonal matrix has empty factors") {
    DenseMatrix a(kF, 9, 9);
    for (int i = 0; i < 9; ++i) a(i, i) = i + 1;
    BruhatGenerator g = bruhat_from_dense(a);
    CHECK(g.CL.count() == 0);
    CHECK(g.CU.count() == 0);
    CHECK(bruhat_expand(g) == a);
  }
  SUBCASE("random instances roundtrip exactly; factors t-overlapping") {
    for (int it = 0; it < 12; ++it) {
      int n = 20 + int(rng.uniform_below(180));
      int s = 1 + int(rng.uniform_below(6));
      SeededRng gen_rng = rng.split(800 + it);
      DenseMatrix a = random_qs_dense(kF, n, s, gen_rng);
      BruhatGenerator g = bruhat_from_dense(a);
      CHECK(bruhat_expand(g) == a);
      CHECK(g.t <= s);
      CHECK(is_t_overlapping(g.CL, s));
      CHECK(is_t_overlapping(g.EL, s));
      CHECK(is_t_overlapping(g.CU, s));
      CHECK(is_t_overlapping(g.EU, s));
    }
  }
  SUBCASE("roundtrip at n = 200, s = 8") {
    SeededRng gen_rng(99);
    DenseMatrix a = random_qs_dense(kF, 200, 8, gen_rng);
    BruhatGenerator g = bruhat_from_dense(a);
    CHECK(bruhat_expand(g) == a);
  }
  SUBCASE("negating the C factors and diagonal negates the expansion") {
    SeededRng gen_rng(98);
    DenseMatrix a = random_qs_dense(kF, 40, 2, gen_rng);
    BruhatGenerator g = bruhat_from_dense(a);
    CHECK(bruhat_expand(negated_gen(g)) == a.negated());
  }
}

TEST_CASE("bruhat roundtrip on structured extremes") {
  SeededRng rng(72);
  SUBCASE("fully random matrix (near-maximal order)") {
    DenseMatrix a = DenseMatrix::random(kF, 60, 60, rng);
    BruhatGenerator g = bruhat_from_dense(a);
    CHECK(bruhat_expand(g) == a);
  }
  SUBCASE("anti-diagonal matrix") {
    DenseMatrix a(kF, 40, 40);
    for (int i = 0; i < 40; ++i) a(i, 39 - i) = i + 1;
    BruhatGenerator g = bruhat_from_dense(a);
    CHECK(bruhat_expand(g) == a);
  }
  SUBCASE("single off-diagonal entries near corners") {
    for (auto [i, j] : {std::pair{39, 0}, {0, 39}, {20, 19}, {19, 20}}) {
      DenseMatrix a(kF, 40, 40);
      a(i, j) = 7;
      BruhatGenerator g = bruhat_from_dense(a);
      CHECK(bruhat_expand(g) == a);
      CHECK(g.storage() <= size_t(4 * 40 + 40));
    }
  }
  SUBCASE("tridiagonal matches the 4ns + n budget tightly") {
    DenseMatrix a(kF, 64, 64);
    for (int i = 0; i < 64; ++i) {
      a(i, i) = 1;
      if (i + 1 < 64) {
        a(i, i + 1) = 2;
        a(i + 1, i) = 3;
      }
    }
    BruhatGenerator g = bruhat_from_dense(a);
    CHECK(bruhat_expand(g) == a);
    CHECK(g.t == 1);
    CHECK(g.storage() <= size_t(4 * 64 + 64));
  }
}

TEST_CASE("bruhat_add chains and sum storage stay bounded") {
  SeededRng r1(81), r2(82), r3(83);
  const int n = 120;
  DenseMatrix a = random_qs_dense(kF, n, 2, r1);
  DenseMatrix b = random_qs_dense(kF, n, 3, r2);
  DenseMatrix c = random_qs_dense(kF, n, 1, r3);
  BruhatGenerator ga = bruhat_from_dense(a);
  BruhatGenerator gb = bruhat_from_dense(b);
  BruhatGenerator gc = bruhat_from_dense(c);
  BruhatGenerator gab = bruhat_add(ga, gb);
  CHECK(bruhat_expand(gab) == add(a, b));
  CHECK(gab.storage() <= size_t(4 * n * (2 + 3) + n));
  // second hop consumes a sum-produced generator
  BruhatGenerator gabc = bruhat_add(gab, gc);
  DenseMatrix want = add(add(a, b), c);
  CHECK(bruhat_expand(gabc) == want);
  CHECK(gabc.storage() <= size_t(4 * n * (2 + 3 + 1) + n));
  DenseMatrix rhs = DenseMatrix::random(kF, n, 4, r1);
  CHECK(bruhat_apply(gabc, rhs, DenseMatrix(kF, n, 4)) == matmul(want, rhs));
}

TEST_CASE("tiny sizes roundtrip in every format") {
  SeededRng rng(71);
  for (int n : {1, 2, 3}) {
    DenseMatrix a = DenseMatrix::random(kF, n, n, rng);
    BruhatGenerator gb = bruhat_from_dense(a);
    CHECK(bruhat_expand(gb) == a);
  }
}

TEST_CASE("bruhat storage bound 4ns + n") {
  SeededRng rng(64);
  const int n = 256, s = 8;
  DenseMatrix a = random_qs_dense(kF, n, s, rng);
  BruhatGenerator g = bruhat_from_dense(a);
  CHECK(g.storage() <= size_t(4 * n * s + n));
}

TEST_CASE("bruhat_apply equals the dense route") {
  SeededRng rng(65);
  SUBCASE("e1 picks the first column") {
    DenseMatrix a = random_qs_dense(kF, 50, 3, rng);
    BruhatGenerator g = bruhat_from_dense(a);
    DenseMatrix b(kF, 50, 1);
    b(0, 0) = 1;
    DenseMatrix got = bruhat_apply(g, b, DenseMatrix(kF, 50, 1));
    for (int i = 0; i < 50; ++i) CHECK(got(i, 0) == a(i, 0));
  }
  SUBCASE("diagonal-only generator scales rows") {
    DenseMatrix a(kF, 7, 7);
    for (int i = 0; i < 7; ++i) a(i, i) = 2 * i + 1;
    BruhatGenerator g = bruhat_from_dense(a);
    SeededRng r2(1);
    DenseMatrix b = DenseMatrix::random(kF, 7, 3, r2);
    DenseMatrix got = bruhat_apply(g, b, DenseMatrix(kF, 7, 3));
    CHECK(got == matmul(a, b));
  }
  SUBCASE("random n = 200, s = 8, v = 5 plus accumulate semantics") {
    for (int it = 0; it < 8; ++it) {
      SeededRng gen_rng = rng.split(40 + it);
      DenseMatrix a = random_qs_dense(kF, 200, 8, gen_rng);
      BruhatGenerator g = bruhat_from_dense(a);
      DenseMatrix b = DenseMatrix::random(kF, 200, 5, gen_rng);
      DenseMatrix c = DenseMatrix::random(kF, 200, 5, gen_rng);
      DenseMatrix want = c;
      matmul_acc(want, a, b);
      CHECK(bruhat_apply(g, b, c) == want);
    }
  }
  SUBCASE("shape mismatch") {
    DenseMatrix a = random_qs_dense(kF, 16, 1, rng);
    BruhatGenerator g = bruhat_from_dense(a);
    CHECK_THROWS_AS(
        bruhat_apply(g, DenseMatrix(kF, 15, 2), DenseMatrix(kF, 16, 2)),
        ShapeError);
  }
}

TEST_CASE("sparse_rank_profiles") {
  SeededRng rng(66);
  SUBCASE("identity with full-width sketch") {
    SparseMatrix a(kF, 6, 6);
    for (int i = 0; i < 6; ++i) a.add_entry(i, i, 1);
    a.finalize();
    SeededRng r(3);
    auto [rp, cp] =
        sparse_rank_profiles(a, DenseMatrix(kF, 6, 0), DenseMatrix(kF, 6, 0),
                             6, r);
    CHECK(rp == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(cp == std::vector<int>{0, 1, 2, 3, 4, 5});
  }
  SUBCASE("zero sparse part with rank-t correction: profiles of -G*H^T") {
    SparseMatrix a(kF, 40, 40);
    a.finalize();
    SeededRng r(4);
    DenseMatrix g = DenseMatrix::random(kF, 40, 3, r);
    DenseMatrix h = DenseMatrix::random(kF, 40, 3, r);
    SeededRng sketch(5);
    auto [rp, cp] = sparse_rank_profiles(a, g, h, 0, sketch);
    DenseMatrix m = matmul(g, h.transposed()).negated();
    auto [wrp, wcp] = rank_profiles(m);
    CHECK(rp == wrp);
    CHECK(cp == wcp);
  }
  SUBCASE("random sparse rank <= s matches the dense oracle, 100 seeds") {
    int agree = 0;
    for (uint64_t seed = 0; seed < 100; ++seed) {
      SeededRng gen_rng(seed);
      SparseMatrix a = random_qs_sparse(kF, 48, 3, 0.04, gen_rng);
      // Strictly-lower slice has rank <= 3 by construction.
      SparseMatrix lois(kF, 48, 48);
      for (const auto& e : a.entries())
        if (e.row > e.col) lois.add_entry(e.row, e.col, e.val);
      lois.finalize();
      SeededRng sketch(seed + 1000);
      auto got = sparse_rank_profiles(lois, DenseMatrix(kF, 48, 0),
                                      DenseMatrix(kF, 48, 0), 3, sketch);
      auto want = rank_profiles(densify(lois));
      if (got.first == want.first && got.second == want.second) ++agree;
    }
    CHECK(agree >= 99);
  }
}

TEST_CASE("sparse_cre") {
  SeededRng rng(67);
  SUBCASE("zero matrix") {
    SparseMatrix a(kF, 5, 5);
    a.finalize();
    SeededRng r(1);
    CREDecomposition d =
        sparse_cre(a, DenseMatrix(kF, 5, 0), DenseMatrix(kF, 5, 0), 0, r);
    CHECK(d.rank == 0);
  }
  SUBCASE("sparse identity") {
    SparseMatrix a(kF, 5, 5);
    for (int i = 0; i < 5; ++i) a.add_entry(i, i, 1);
    a.finalize();
    SeededRng r(2);
    CREDecomposition d =
        sparse_cre(a, DenseMatrix(kF, 5, 0), DenseMatrix(kF, 5, 0), 5, r);
    CHECK(d.rank == 5);
    CHECK(d.product() == DenseMatrix::identity(kF, 5));
  }
  SUBCASE("random sparse rank 3 with correction reconstructs exactly") {
    for (int it = 0; it < 10; ++it) {
      SeededRng gen_rng = rng.split(70 + it);
      // rank <= 3 sparse: three scattered rows
      SparseMatrix a(kF, 64, 64);
      for (int r0 : {5, 20, 40})
        for (int c = 0; c < 64; c += 1 + int(gen_rng.uniform_below(4)))
          a.add_entry(r0, c, gen_rng.uniform_nonzero(kF));
      a.finalize();
      DenseMatrix g = DenseMatrix::random(kF, 64, 2, gen_rng);
      DenseMatrix h = DenseMatrix::random(kF, 64, 2, gen_rng);
      SeededRng sketch = gen_rng.split(17);
      CREDecomposition d = sparse_cre(a, g, h, 3, sketch);
      DenseMatrix want = densify(a);
      want.sub_in_place(matmul(g, h.transposed()));
      CHECK(d.product() == want);
    }
  }
}

TEST_CASE("bruhat_from_sparse") {
  SeededRng rng(68);
  SUBCASE("sparse diagonal") {
    SparseMatrix a(kF, 10, 10);
    for (int i = 0; i < 10; ++i) a.add_entry(i, i, uint32_t(i + 1));
    a.finalize();
    BruhatGenerator g = bruhat_from_sparse(a, 0, 42);
    CHECK(g.CL.count() == 0);
    CHECK(bruhat_expand(g) == densify(a));
  }
  SUBCASE("agrees with the dense construction on random instances") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
      SeededRng gen_rng(seed);
      SparseMatrix a = random_qs_sparse(kF, 128, 6, 0.03, gen_rng);
      BruhatGenerator gs = bruhat_from_sparse(a, 6, seed + 5000);
      DenseMatrix ad = densify(a);
      CHECK(bruhat_expand(gs) == ad);
      BruhatGenerator gd = bruhat_from_dense(ad);
      CHECK(bruhat_expand(gd) == ad);
    }
  }
}

TEST_CASE("bruhat_sum_cre") {
  SeededRng rng(69);
  auto make_slice = [&](int m, int r, SeededRng& r2) {
    FactoredSlice s;
    s.C = DenseMatrix::random(kF, m, r, r2);
    s.E = DenseMatrix::random(kF, r, m, r2);
    s.perm.resize(size_t(r));
    for (int k = 0; k < r; ++k) s.perm[k] = k;
    // random pairing
    for (int k = r - 1; k > 0; --k)
      std::swap(s.perm[k], s.perm[r2.uniform_below(uint64_t(k + 1))]);
    return s;
  };
  auto slice_product = [&](const FactoredSlice& s) {
    DenseMatrix re(kF, s.C.cols(), s.E.cols());
    for (int k = 0; k < s.C.cols(); ++k)
      std::copy_n(s.E.row_ptr(s.perm[k]), s.E.cols(), re.row_ptr(k));
    return matmul(s.C, re);
  };
  SUBCASE("empty second operand and correction reduce to plain CRE") {
    SeededRng r2 = rng.split(1);
    FactoredSlice a = make_slice(20, 3, r2);
    FactoredSlice b;
    b.C = DenseMatrix(kF, 20, 0);
    b.E = DenseMatrix(kF, 0, 20);
    CREDecomposition d =
        bruhat_sum_cre(a, b, DenseMatrix(kF, 20, 0), DenseMatrix(kF, 20, 0));
    CHECK(d.product() == slice_product(a));
  }
  SUBCASE("negated operand cancels to rank 0") {
    SeededRng r2 = rng.split(2);
    FactoredSlice a = make_slice(16, 2, r2);
    FactoredSlice b = a;
    b.C = b.C.negated();
    CREDecomposition d =
        bruhat_sum_cre(a, b, DenseMatrix(kF, 16, 0), DenseMatrix(kF, 16, 0));
    CHECK(d.rank == 0);
  }
  SUBCASE("random pairs with correction") {
    for (int it = 0; it < 10; ++it) {
      SeededRng r2 = rng.split(100 + it);
      FactoredSlice a = make_slice(24, 3, r2);
      FactoredSlice b = make_slice(24, 2, r2);
      DenseMatrix g = DenseMatrix::random(kF, 24, 2, r2);
      DenseMatrix h = DenseMatrix::random(kF, 24, 2, r2);
      CREDecomposition d = bruhat_sum_cre(a, b, g, h);
      DenseMatrix want = add(slice_product(a), slice_product(b));
      want.sub_in_place(matmul(g, h.transposed()));
      CHECK(d.product() == want);
    }
  }
}

TEST_CASE("bruhat_add") {
  SeededRng rng(70);
  SUBCASE("adding a zero generator preserves the expansion") {
    SeededRng gen_rng(7);
    DenseMatrix a = random_qs_dense(kF, 60, 3, gen_rng);
    DenseMatrix z(kF, 60, 60);
    BruhatGenerator ga = bruhat_from_dense(a);
    BruhatGenerator gz = bruhat_from_dense(z);
    BruhatGenerator sum = bruhat_add(ga, gz);
    CHECK(bruhat_expand(sum) == a);
  }
  SUBCASE("adding the negation gives the zero generator") {
    SeededRng gen_rng(8);
    DenseMatrix a = random_qs_dense(kF, 48, 2, gen_rng);
    BruhatGenerator ga = bruhat_from_dense(a);
    BruhatGenerator gn = bruhat_from_dense(a.negated());
    BruhatGenerator sum = bruhat_add(ga, gn);
    CHECK(sum.CL.count() == 0);
    CHECK(sum.CU.count() == 0);
    CHECK(bruhat_expand(sum).is_zero());
  }
  SUBCASE("mixed orders s_A != s_B vs the dense sum") {
    for (int it = 0; it < 8; ++it) {
      int n = 40 + int(rng.uniform_below(180));
      SeededRng r1 = rng.split(900 + it), r2 = rng.split(990 + it);
      DenseMatrix a = random_qs_dense(kF, n, 4, r1);
      DenseMatrix b = random_qs_dense(kF, n, 6, r2);
      BruhatGenerator sum =
          bruhat_add(bruhat_from_dense(a), bruhat_from_dense(b));
      CHECK(bruhat_expand(sum) == add(a, b));
      CHECK(sum.t <= 10);
    }
  }
  SUBCASE("dimension mismatch") {
    DenseMatrix a(kF, 4, 4), b(kF, 5, 5);
    CHECK_THROWS_AS(bruhat_add(bruhat_from_dense(a), bruhat_from_dense(b)),
                    ShapeError);
  }
}
