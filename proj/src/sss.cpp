#include "qsep/sss.hpp"

#include <algorithm>
#include <string>

namespace qsep {

namespace {

void check_grid(const SSSGenerator& a, const SSSGenerator& b) {
  if (a.n != b.n || a.t != b.t || a.N != b.N || a.field != b.field)
    throw GridError("SSS operands live on different grids");
}

SSSGenerator make_empty(const PrimeField& f, int n, int t) {
  if (t <= 0 || n < 0) throw ParamError("SSS block size must be positive");
  SSSGenerator g;
  g.field = f;
  g.n = n;
  g.t = t;
  g.N = n == 0 ? 0 : (n + t - 1) / t;
  int nb = g.N;
  g.lrank.assign(std::max(nb - 1, 0), 0);
  g.urank.assign(std::max(nb - 1, 0), 0);
  g.D.assign(nb, DenseMatrix());
  g.P.assign(nb, DenseMatrix());
  g.Q.assign(nb, DenseMatrix());
  g.R.assign(nb, DenseMatrix());
  g.U.assign(nb, DenseMatrix());
  g.W.assign(nb, DenseMatrix());
  g.V.assign(nb, DenseMatrix());
  for (int i = 0; i < nb; ++i)
    g.D[i] = DenseMatrix(f, g.block_size(i), g.block_size(i));
  return g;
}

}  // namespace

DenseMatrix SSSGenerator::matP(int i) const {
  if (i >= 1 && i < N && !P[i].is_empty()) return P[i];
  return DenseMatrix(field, i >= 0 && i < N ? block_size(i) : 0, lr(i - 1));
}
DenseMatrix SSSGenerator::matQ(int i) const {
  if (i >= 0 && i < N - 1 && !Q[i].is_empty()) return Q[i];
  return DenseMatrix(field, lr(i), i >= 0 && i < N ? block_size(i) : 0);
}
DenseMatrix SSSGenerator::matR(int i) const {
  if (i >= 1 && i < N - 1 && !R[i].is_empty()) return R[i];
  return DenseMatrix(field, lr(i), lr(i - 1));
}
DenseMatrix SSSGenerator::matU(int i) const {
  if (i >= 0 && i < N - 1 && !U[i].is_empty()) return U[i];
  return DenseMatrix(field, i >= 0 && i < N ? block_size(i) : 0, ur(i));
}
DenseMatrix SSSGenerator::matW(int i) const {
  if (i >= 1 && i < N - 1 && !W[i].is_empty()) return W[i];
  return DenseMatrix(field, ur(i - 1), ur(i));
}
DenseMatrix SSSGenerator::matV(int i) const {
  if (i >= 1 && i < N && !V[i].is_empty()) return V[i];
  return DenseMatrix(field, ur(i - 1), i >= 0 && i < N ? block_size(i) : 0);
}

size_t SSSGenerator::storage() const {
  size_t s = 0;
  auto count = [&s](const std::vector<DenseMatrix>& v) {
    for (const auto& m : v) s += m.data().size();
  };
  count(D);
  count(P);
  count(Q);
  count(R);
  count(U);
  count(W);
  count(V);
  return s;
}

void SSSGenerator::validate() const {
  auto expect = [](const DenseMatrix& m, int r, int c, const char* what) {
    if (m.rows() != r || m.cols() != c)
      throw ShapeError(std::string("SSS generator: bad ") + what +
                       " dimensions");
  };
  for (int i = 0; i < N; ++i) {
    expect(D[i], block_size(i), block_size(i), "D");
    expect(matP(i), block_size(i), lr(i - 1), "P");
    expect(matQ(i), lr(i), block_size(i), "Q");
    expect(matR(i), lr(i), lr(i - 1), "R");
    expect(matU(i), block_size(i), ur(i), "U");
    expect(matW(i), ur(i - 1), ur(i), "W");
    expect(matV(i), ur(i - 1), block_size(i), "V");
  }
}

SSSGenerator sss_from_dense(const DenseMatrix& a, int t) {
  if (a.rows() != a.cols()) throw ShapeError("sss_from_dense: not square");
  const PrimeField& f = a.field();
  const int n = a.rows();
  SSSGenerator g = make_empty(f, n, t);
  const int nb = g.N;
  for (int i = 0; i < nb; ++i)
    g.D[i] = a.block(g.block_start(i), g.block_start(i), g.block_size(i),
                     g.block_size(i));
  if (nb <= 1) return g;

  // Each step eliminates one block row (upper part) and one block column
  // (lower part), carrying a rank-revealed remainder to the next step.
  DenseMatrix hu(f, 0, n - g.block_start(1));  // remainder right of cut k
  DenseMatrix hl(f, n - g.block_start(1), 0);  // remainder below cut k
  for (int k = 0; k < nb - 1; ++k) {
    const int cut = g.block_start(k + 1);
    const int bs = g.block_size(k);
    const int tail = n - cut;

    DenseMatrix arow = a.block(g.block_start(k), cut, bs, tail);
    auto [luf, ruf] = rank_factor(vconcat(hu, arow));
    int uk = luf.cols();
    if (uk > t)
      throw OrderExceeded(
          "upper chunk rank " + std::to_string(uk) + " exceeds block size " +
              std::to_string(t) + " at step " + std::to_string(k),
          k);
    g.urank[k] = uk;
    if (k > 0) g.W[k] = luf.block(0, 0, hu.rows(), uk);
    g.U[k] = luf.block(hu.rows(), 0, bs, uk);
    g.V[k + 1] = ruf.block(0, 0, uk, g.block_size(k + 1));
    hu = ruf.block(0, g.block_size(k + 1), uk, tail - g.block_size(k + 1));

    DenseMatrix acol = a.block(cut, g.block_start(k), tail, bs);
    auto [llf, rlf] = rank_factor(hconcat(hl, acol));
    int lk = llf.cols();
    if (lk > t)
      throw OrderExceeded(
          "lower chunk rank " + std::to_string(lk) + " exceeds block size " +
              std::to_string(t) + " at step " + std::to_string(k),
          k);
    g.lrank[k] = lk;
    if (k > 0) g.R[k] = rlf.block(0, 0, lk, hl.cols());
    g.Q[k] = rlf.block(0, hl.cols(), lk, bs);
    g.P[k + 1] = llf.block(0, 0, g.block_size(k + 1), lk);
    hl = llf.block(g.block_size(k + 1), 0, tail - g.block_size(k + 1), lk);
  }
  return g;
}

DenseMatrix sss_expand(const SSSGenerator& g) {
  DenseMatrix a(g.field, g.n, g.n);
  for (int i = 0; i < g.N; ++i)
    a.set_block(g.block_start(i), g.block_start(i), g.D[i]);
  // Lower chains: walk each block column downward, reusing the R prefix.
  for (int j = 0; j + 1 < g.N; ++j) {
    DenseMatrix acc = g.matQ(j);
    for (int i = j + 1; i < g.N; ++i) {
      a.set_block(g.block_start(i), g.block_start(j), matmul(g.matP(i), acc));
      if (i + 1 < g.N) acc = matmul(g.matR(i), acc);
    }
  }
  // Upper chains, symmetric.
  for (int i = 0; i + 1 < g.N; ++i) {
    DenseMatrix acc = g.matU(i);
    for (int j = i + 1; j < g.N; ++j) {
      a.set_block(g.block_start(i), g.block_start(j), matmul(acc, g.matV(j)));
      if (j + 1 < g.N) acc = matmul(acc, g.matW(j));
    }
  }
  return a;
}

namespace {

// One panel of the product, v <= t columns: forward accumulator sweep for
// the lower part, backward sweep for the upper part, plus the diagonal.
void sss_apply_panel(const SSSGenerator& g, const DenseMatrix& b,
                     DenseMatrix& c) {
  const int nb = g.N;
  const int v = b.cols();
  std::vector<DenseMatrix> bblk(nb);
  for (int i = 0; i < nb; ++i)
    bblk[i] = b.block(g.block_start(i), 0, g.block_size(i), v);

  auto add_block = [&](int i, const DenseMatrix& m) {
    for (int r = 0; r < m.rows(); ++r)
      for (int col = 0; col < v; ++col) {
        uint32_t& dst = c(g.block_start(i) + r, col);
        dst = g.field.add(dst, m(r, col));
      }
  };

  for (int i = 0; i < nb; ++i) add_block(i, matmul(g.D[i], bblk[i]));

  if (nb <= 1) return;
  DenseMatrix h = matmul(g.matQ(0), bblk[0]);
  for (int i = 1; i < nb; ++i) {
    add_block(i, matmul(g.matP(i), h));
    if (i < nb - 1) {
      DenseMatrix nh = matmul(g.matQ(i), bblk[i]);
      matmul_acc(nh, g.matR(i), h);
      h = std::move(nh);
    }
  }
  DenseMatrix e = matmul(g.matV(nb - 1), bblk[nb - 1]);
  for (int i = nb - 2; i >= 0; --i) {
    add_block(i, matmul(g.matU(i), e));
    if (i > 0) {
      DenseMatrix ne = matmul(g.matV(i), bblk[i]);
      matmul_acc(ne, g.matW(i), e);
      e = std::move(ne);
    }
  }
}

}  // namespace

DenseMatrix sss_apply(const SSSGenerator& g, const DenseMatrix& b,
                      const DenseMatrix& c) {
  if (b.rows() != g.n || c.rows() != g.n || c.cols() != b.cols())
    throw ShapeError("sss_apply: non-conformal dimensions");
  if (b.field() != g.field || c.field() != g.field)
    throw ShapeError("sss_apply: field mismatch");
  DenseMatrix out(c);
  for (int c0 = 0; c0 < b.cols(); c0 += g.t) {
    int w = std::min(g.t, b.cols() - c0);
    DenseMatrix panel = b.block(0, c0, g.n, w);
    DenseMatrix cpanel(g.field, g.n, w);
    sss_apply_panel(g, panel, cpanel);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < w; ++j)
        out(i, c0 + j) = g.field.add(out(i, c0 + j), cpanel(i, j));
  }
  return out;
}

SSSWideGenerator sss_concat(const SSSGenerator& gb, const SSSGenerator& gc) {
  check_grid(gb, gc);
  SSSWideGenerator g = make_empty(gb.field, gb.n, gb.t);
  const PrimeField& f = gb.field;
  for (int i = 0; i < g.N; ++i) g.D[i] = add(gb.D[i], gc.D[i]);
  for (int k = 0; k + 1 < g.N; ++k) {
    g.lrank[k] = gb.lrank[k] + gc.lrank[k];
    g.urank[k] = gb.urank[k] + gc.urank[k];
  }
  auto diag_sum = [&f](const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix m(f, a.rows() + b.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(a.rows(), a.cols(), b);
    return m;
  };
  for (int i = 0; i < g.N; ++i) {
    if (i >= 1) {
      g.P[i] = hconcat(gb.matP(i), gc.matP(i));
      g.V[i] = vconcat(gb.matV(i), gc.matV(i));
    }
    if (i < g.N - 1) {
      g.Q[i] = vconcat(gb.matQ(i), gc.matQ(i));
      g.U[i] = hconcat(gb.matU(i), gc.matU(i));
    }
    if (i >= 1 && i < g.N - 1) {
      g.R[i] = diag_sum(gb.matR(i), gc.matR(i));
      g.W[i] = diag_sum(gb.matW(i), gc.matW(i));
    }
  }
  return g;
}

SSSGenerator sss_compress(const SSSWideGenerator& g) {
  const PrimeField& f = g.field;
  const int m = (g.N + 1) / 2;
  SSSGenerator out;
  out.field = f;
  out.n = g.n;
  out.t = 2 * g.t;
  out.N = m;
  out.lrank.assign(std::max(m - 1, 0), 0);
  out.urank.assign(std::max(m - 1, 0), 0);
  out.D.assign(m, DenseMatrix());
  out.P.assign(m, DenseMatrix());
  out.Q.assign(m, DenseMatrix());
  out.R.assign(m, DenseMatrix());
  out.U.assign(m, DenseMatrix());
  out.W.assign(m, DenseMatrix());
  out.V.assign(m, DenseMatrix());

  // Odd N: block 2i+1 of the last pair does not exist; the accessors give
  // 0-dimensional matrices and the formulas collapse to the lone block.
  auto bs = [&](int i) { return i < g.N ? g.block_size(i) : 0; };
  for (int i = 0; i < m; ++i) {
    const int a0 = 2 * i, a1 = 2 * i + 1;
    // New diagonal block covers old blocks a0 and a1.
    DenseMatrix d(f, bs(a0) + bs(a1), bs(a0) + bs(a1));
    d.set_block(0, 0, g.D[a0]);
    if (a1 < g.N) {
      d.set_block(bs(a0), bs(a0), g.D[a1]);
      d.set_block(0, bs(a0), matmul(g.matU(a0), g.matV(a1)));
      d.set_block(bs(a0), 0, matmul(g.matP(a1), g.matQ(a0)));
    }
    out.D[i] = d;

    if (i > 0) {
      out.P[i] = vconcat(g.matP(a0), matmul(g.matP(a1), g.matR(a0)));
      out.V[i] = hconcat(g.matV(a0), matmul(g.matW(a0), g.matV(a1)));
    }
    if (i < m - 1) {
      out.Q[i] = hconcat(matmul(g.matR(a1), g.matQ(a0)), g.matQ(a1));
      out.U[i] = vconcat(matmul(g.matU(a0), g.matW(a1)), g.matU(a1));
      out.lrank[i] = g.lr(a1);
      out.urank[i] = g.ur(a1);
    }
    if (i > 0 && i < m - 1) {
      out.R[i] = matmul(g.matR(a1), g.matR(a0));
      out.W[i] = matmul(g.matW(a0), g.matW(a1));
    }
  }
  return out;
}

SSSGenerator sss_add(const SSSGenerator& gb, const SSSGenerator& gc) {
  return sss_compress(sss_concat(gb, gc));
}

SSSGenerator sss_mul(const SSSGenerator& ga, const SSSGenerator& gb) {
  check_grid(ga, gb);
  const PrimeField& f = ga.field;
  const int nb = ga.N;
  SSSWideGenerator g = make_empty(f, ga.n, ga.t);
  if (nb == 0) return sss_compress(g);
  for (int k = 0; k + 1 < nb; ++k) {
    g.lrank[k] = gb.lr(k) + ga.lr(k);
    g.urank[k] = ga.ur(k) + gb.ur(k);
  }

  // Forward sweep: gacc[i] accumulates the lower(A) x upper(B) cross terms;
  // tcache keeps R^A*gacc and pcache P^A*gacc for reuse.
  std::vector<DenseMatrix> gacc(nb), scache(nb);
  DenseMatrix tprev;  // T_{i-1} = R^A_{i-1} * gacc_{i-1}
  for (int i = 0; i < nb; ++i) {
    DenseMatrix gi(f, ga.lr(i - 1), gb.ur(i - 1));
    if (i > 0) {
      gi = matmul(ga.matQ(i - 1), gb.matU(i - 1));
      matmul_acc(gi, tprev, gb.matW(i - 1));
    }
    DenseMatrix ti = matmul(ga.matR(i), gi);
    scache[i] = matmul(ga.matP(i), gi);
    gacc[i] = std::move(gi);

    if (i < nb - 1) {
      DenseMatrix qlow = matmul(ga.matQ(i), gb.D[i]);
      matmul_acc(qlow, ti, gb.matV(i));
      g.Q[i] = vconcat(gb.matQ(i), qlow);

      DenseMatrix uup = matmul(ga.D[i], gb.matU(i));
      matmul_acc(uup, scache[i], gb.matW(i));
      g.U[i] = hconcat(ga.matU(i), uup);
    }
    if (i >= 1 && i < nb - 1) {
      DenseMatrix r(f, g.lrank[i], g.lrank[i - 1]);
      r.set_block(0, 0, gb.matR(i));
      r.set_block(gb.lr(i), 0, matmul(ga.matQ(i), gb.matP(i)));
      r.set_block(gb.lr(i), gb.lr(i - 1), ga.matR(i));
      g.R[i] = r;

      DenseMatrix w(f, g.urank[i - 1], g.urank[i]);
      w.set_block(0, 0, ga.matW(i));
      w.set_block(0, ga.ur(i), matmul(ga.matV(i), gb.matU(i)));
      w.set_block(ga.ur(i - 1), ga.ur(i), gb.matW(i));
      g.W[i] = w;
    }
    tprev = std::move(ti);
  }

  // Backward sweep: the accumulator carries the upper(A) x lower(B) cross
  // terms; only W^A_{i+1}*hacc_{i+1} is needed across iterations.
  DenseMatrix tnext;
  for (int i = nb - 1; i >= 0; --i) {
    DenseMatrix hi(f, ga.ur(i), gb.lr(i));
    if (i < nb - 1) {
      hi = matmul(ga.matV(i + 1), gb.matP(i + 1));
      matmul_acc(hi, tnext, gb.matR(i + 1));
    }
    DenseMatrix tu = matmul(ga.matU(i), hi);

    DenseMatrix di = matmul(ga.D[i], gb.D[i]);
    matmul_acc(di, scache[i], gb.matV(i));
    matmul_acc(di, tu, gb.matQ(i));
    g.D[i] = std::move(di);

    if (i >= 1) {
      DenseMatrix plow = matmul(ga.D[i], gb.matP(i));
      matmul_acc(plow, tu, gb.matR(i));
      g.P[i] = hconcat(plow, ga.matP(i));
    }

    DenseMatrix tw = matmul(ga.matW(i), hi);
    if (i >= 1) {
      DenseMatrix vup = matmul(ga.matV(i), gb.D[i]);
      matmul_acc(vup, tw, gb.matQ(i));
      g.V[i] = vconcat(vup, gb.matV(i));
    }
    tnext = std::move(tw);
  }
  return sss_compress(g);
}

SSSGenerator sss_identity(const PrimeField& f, int n, int t) {
  SSSGenerator g = make_empty(f, n, t);
  for (int i = 0; i < g.N; ++i)
    g.D[i] = DenseMatrix::identity(f, g.block_size(i));
  return g;
}

SSSGenerator sss_zero(const PrimeField& f, int n, int t) {
  return make_empty(f, n, t);
}

}  // namespace qsep
