#include "qsep/hss.hpp"

#include <string>

namespace qsep {

void HSSGenerator::validate() const {
  auto expect = [](bool ok, const char* what) {
    if (!ok) throw ShapeError(std::string("HSS generator: bad ") + what);
  };
  expect(K >= 1 && t >= 1 && n_pad == t << K && n >= 0 && n <= n_pad,
         "tree shape");
  const int nl = leaves();
  expect(int(D.size()) == nl && int(Uleaf.size()) == nl &&
             int(Vleaf.size()) == nl,
         "leaf arrays");
  expect(int(R.size()) == K + 1 && int(W.size()) == K + 1 &&
             int(B.size()) == K + 1,
         "level arrays");
  auto rr = [&](int k, int i) {
    return k == K ? Uleaf[i].cols() : R[k + 1][2 * i].cols();
  };
  auto rc = [&](int k, int i) {
    return k == K ? Vleaf[i].rows() : W[k + 1][2 * i].rows();
  };
  for (int i = 0; i < nl; ++i) {
    expect(D[i].rows() == t && D[i].cols() == t, "D dimensions");
    expect(Uleaf[i].rows() == t, "leaf U dimensions");
    expect(Vleaf[i].cols() == t, "leaf V dimensions");
  }
  for (int k = 1; k <= K; ++k) {
    const int nk = 1 << k;
    expect(int(B[k].size()) == nk, "B count");
    if (k >= 2)
      expect(int(R[k].size()) == nk && int(W[k].size()) == nk, "R/W count");
    for (int i = 0; i < nk; ++i) {
      if (k >= 2) {
        expect(R[k][i].rows() == rr(k, i) &&
                   R[k][i].cols() == rr(k - 1, i / 2),
               "R dimensions");
        expect(W[k][i].rows() == rc(k - 1, i / 2) &&
                   W[k][i].cols() == rc(k, i),
               "W dimensions");
      }
      expect(B[k][i].rows() == rr(k, i) && B[k][i].cols() == rc(k, i ^ 1),
             "B dimensions");
    }
  }
}

size_t HSSGenerator::storage() const {
  size_t s = 0;
  auto count = [&s](const std::vector<DenseMatrix>& v) {
    for (const auto& m : v) s += m.data().size();
  };
  count(D);
  count(Uleaf);
  count(Vleaf);
  for (int k = 2; k <= K; ++k) {
    count(R[k]);
    count(W[k]);
  }
  for (int k = 1; k <= K; ++k) count(B[k]);
  return s;
}

HSSGenerator hss_from_dense(const DenseMatrix& a, int t) {
  if (a.rows() != a.cols()) throw ShapeError("hss_from_dense: not square");
  if (t < 1) throw ParamError("hss_from_dense: block size must be positive");
  const PrimeField& f = a.field();
  const int n = a.rows();

  HSSGenerator g;
  g.field = f;
  g.n = n;
  g.t = t;
  g.K = 1;
  while (t * (1 << g.K) < n) ++g.K;
  g.n_pad = t << g.K;
  const int nl = g.leaves();

  DenseMatrix ap(f, g.n_pad, g.n_pad);
  ap.set_block(0, 0, a);

  g.D.resize(nl);
  g.Uleaf.resize(nl);
  g.Vleaf.resize(nl);
  g.R.assign(size_t(g.K) + 1, {});
  g.W.assign(size_t(g.K) + 1, {});
  g.B.assign(size_t(g.K) + 1, {});

  // Working block matrix; off-diagonal blocks shrink as levels compress.
  std::vector<std::vector<DenseMatrix>> blk(nl,
                                            std::vector<DenseMatrix>(nl));
  for (int i = 0; i < nl; ++i) {
    g.D[i] = ap.block(i * t, i * t, t, t);
    for (int j = 0; j < nl; ++j)
      if (j != i) blk[i][j] = ap.block(i * t, j * t, t, t);
  }

  std::vector<int> prev_rr(nl, t), prev_rc(nl, t);
  for (int k = g.K; k >= 1; --k) {
    const int nk = 1 << k;
    std::vector<int> rr(nk), rc(nk);
    for (int i = 0; i < nk; ++i) {
      // Row pass: factor block row i without its diagonal block.  Blocks
      // left of the diagonal were already column-compressed this level.
      const int height = blk[i][i == 0 ? 1 : 0].rows();
      int width = 0;
      for (int j = 0; j < nk; ++j)
        if (j != i) width += blk[i][j].cols();
      DenseMatrix strip(f, height, width);
      for (int j = 0, off = 0; j < nk; ++j) {
        if (j == i) continue;
        strip.set_block(0, off, blk[i][j]);
        off += blk[i][j].cols();
      }
      auto [lf, rf] = rank_factor(strip);
      if (lf.cols() > t)
        throw OrderExceeded("row strip rank " + std::to_string(lf.cols()) +
                                " exceeds block size " + std::to_string(t) +
                                " at level " + std::to_string(k) + " node " +
                                std::to_string(i),
                            k, i);
      rr[i] = lf.cols();
      int off = 0;
      for (int j = 0; j < nk; ++j) {
        if (j == i) continue;
        int w = blk[i][j].cols();
        blk[i][j] = rf.block(0, off, rr[i], w);
        off += w;
      }
      if (k == g.K) {
        g.Uleaf[i] = lf;
      } else {
        if (int(g.R[k + 1].size()) != nk * 2)
          g.R[k + 1].resize(size_t(nk) * 2);
        g.R[k + 1][2 * i] = lf.block(0, 0, prev_rr[2 * i], rr[i]);
        g.R[k + 1][2 * i + 1] =
            lf.block(prev_rr[2 * i], 0, prev_rr[2 * i + 1], rr[i]);
      }

      // Column pass: factor block column i without its diagonal block; the
      // left factor holds the written-back remainders, the right one the
      // column transitions.
      const int cwidth = blk[i == 0 ? 1 : 0][i].cols();
      int cheight = 0;
      for (int j = 0; j < nk; ++j)
        if (j != i) cheight += blk[j][i].rows();
      DenseMatrix stripc(f, cheight, cwidth);
      for (int j = 0, off = 0; j < nk; ++j) {
        if (j == i) continue;
        stripc.set_block(off, 0, blk[j][i]);
        off += blk[j][i].rows();
      }
      auto [left, right] = rank_factor(stripc);
      if (right.rows() > t)
        throw OrderExceeded("column strip rank " +
                                std::to_string(right.rows()) +
                                " exceeds block size " + std::to_string(t) +
                                " at level " + std::to_string(k) + " node " +
                                std::to_string(i),
                            k, i);
      rc[i] = right.rows();
      off = 0;
      for (int j = 0; j < nk; ++j) {
        if (j == i) continue;
        int h = blk[j][i].rows();
        blk[j][i] = left.block(off, 0, h, rc[i]);
        off += h;
      }
      if (k == g.K) {
        g.Vleaf[i] = right;
      } else {
        if (int(g.W[k + 1].size()) != nk * 2)
          g.W[k + 1].resize(size_t(nk) * 2);
        g.W[k + 1][2 * i] = right.block(0, 0, rc[i], prev_rc[2 * i]);
        g.W[k + 1][2 * i + 1] =
            right.block(0, prev_rc[2 * i], rc[i], prev_rc[2 * i + 1]);
      }
    }

    // Sibling couplings, then the assembled blocks of the next level up.
    g.B[k].resize(nk);
    for (int i = 0; i < nk / 2; ++i) {
      g.B[k][2 * i] = blk[2 * i][2 * i + 1];
      g.B[k][2 * i + 1] = blk[2 * i + 1][2 * i];
    }
    if (k > 1) {
      const int nh = nk / 2;
      std::vector<std::vector<DenseMatrix>> nb(nh,
                                               std::vector<DenseMatrix>(nh));
      for (int i = 0; i < nh; ++i)
        for (int j = 0; j < nh; ++j) {
          if (i == j) continue;
          nb[i][j] = vconcat(
              hconcat(blk[2 * i][2 * j], blk[2 * i][2 * j + 1]),
              hconcat(blk[2 * i + 1][2 * j], blk[2 * i + 1][2 * j + 1]));
        }
      blk = std::move(nb);
    }
    prev_rr = rr;
    prev_rc = rc;
  }
  return g;
}

DenseMatrix hss_expand(const HSSGenerator& g) {
  const PrimeField& f = g.field;
  DenseMatrix ap(f, g.n_pad, g.n_pad);
  const int nl = g.leaves();
  for (int i = 0; i < nl; ++i) ap.set_block(i * g.t, i * g.t, g.D[i]);

  // Aggregates per level, leaves upward.
  std::vector<std::vector<DenseMatrix>> uagg(size_t(g.K) + 1),
      vagg(size_t(g.K) + 1);
  uagg[g.K] = g.Uleaf;
  vagg[g.K] = g.Vleaf;
  for (int k = g.K - 1; k >= 1; --k) {
    const int nk = 1 << k;
    uagg[k].resize(nk);
    vagg[k].resize(nk);
    for (int i = 0; i < nk; ++i) {
      uagg[k][i] = vconcat(matmul(uagg[k + 1][2 * i], g.R[k + 1][2 * i]),
                           matmul(uagg[k + 1][2 * i + 1], g.R[k + 1][2 * i + 1]));
      vagg[k][i] = hconcat(matmul(g.W[k + 1][2 * i], vagg[k + 1][2 * i]),
                           matmul(g.W[k + 1][2 * i + 1], vagg[k + 1][2 * i + 1]));
    }
  }
  for (int k = 1; k <= g.K; ++k) {
    const int span = g.t << (g.K - k);
    for (int i = 0; i < (1 << k) / 2; ++i) {
      int a = 2 * i, b = 2 * i + 1;
      ap.set_block(a * span, b * span,
                   matmul(uagg[k][a], matmul(g.B[k][a], vagg[k][b])));
      ap.set_block(b * span, a * span,
                   matmul(uagg[k][b], matmul(g.B[k][b], vagg[k][a])));
    }
  }
  return g.n == g.n_pad ? ap : ap.block(0, 0, g.n, g.n);
}

DenseMatrix hss_apply(const HSSGenerator& g, const DenseMatrix& b,
                      const DenseMatrix& c) {
  if (b.rows() != g.n || c.rows() != g.n || c.cols() != b.cols())
    throw ShapeError("hss_apply: non-conformal dimensions");
  if (b.field() != g.field || c.field() != g.field)
    throw ShapeError("hss_apply: field mismatch");
  const PrimeField& f = g.field;
  const int v = b.cols();
  const int nl = g.leaves();

  DenseMatrix bp(f, g.n_pad, v);
  bp.set_block(0, 0, b);

  // Upward sweep: project the right-hand side through the V side.
  std::vector<std::vector<DenseMatrix>> vb(size_t(g.K) + 1);
  vb[g.K].resize(nl);
  for (int i = 0; i < nl; ++i)
    vb[g.K][i] = matmul(g.Vleaf[i], bp.block(i * g.t, 0, g.t, v));
  for (int k = g.K - 1; k >= 1; --k) {
    const int nk = 1 << k;
    vb[k].resize(nk);
    for (int i = 0; i < nk; ++i) {
      vb[k][i] = matmul(g.W[k + 1][2 * i], vb[k + 1][2 * i]);
      matmul_acc(vb[k][i], g.W[k + 1][2 * i + 1], vb[k + 1][2 * i + 1]);
    }
  }

  // Couple siblings, then push the coefficients down through the R side.
  std::vector<std::vector<DenseMatrix>> coef(size_t(g.K) + 1);
  for (int k = 1; k <= g.K; ++k) {
    const int nk = 1 << k;
    coef[k].resize(nk);
    for (int i = 0; i < nk; ++i) {
      int sib = i ^ 1;
      coef[k][i] = matmul(g.B[k][i], vb[k][sib]);
      if (k > 1) {
        DenseMatrix down = matmul(g.R[k][i], coef[k - 1][i / 2]);
        coef[k][i].add_in_place(down);
      }
    }
  }

  DenseMatrix out(f, g.n_pad, v);
  for (int i = 0; i < nl; ++i) {
    DenseMatrix leaf = matmul(g.D[i], bp.block(i * g.t, 0, g.t, v));
    matmul_acc(leaf, g.Uleaf[i], coef[g.K][i]);
    out.set_block(i * g.t, 0, leaf);
  }
  DenseMatrix res(c);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < v; ++j) res(i, j) = f.add(res(i, j), out(i, j));
  return res;
}

}  // namespace qsep
