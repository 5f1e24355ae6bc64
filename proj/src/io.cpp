#include "qsep/io.hpp"

#include <fstream>
#include <sstream>

namespace qsep {

namespace {

uint64_t read_u64(std::istream& is, const char* what) {
  uint64_t x;
  if (!(is >> x)) throw ParseError(std::string("expected ") + what);
  return x;
}

int read_int(std::istream& is, const char* what) {
  int64_t x;
  if (!(is >> x) || x < 0 || x > (1ll << 31))
    throw ParseError(std::string("expected ") + what);
  return int(x);
}

PrimeField read_field(std::istream& is) {
  uint64_t p = read_u64(is, "modulus");
  try {
    return PrimeField(uint32_t(p));
  } catch (const ParamError& e) {
    throw ParseError(e.what());
  }
}

uint32_t read_residue(std::istream& is, const PrimeField& f) {
  uint64_t v = read_u64(is, "residue");
  if (v >= f.p()) throw ParseError("residue out of range");
  return uint32_t(v);
}

void write_matrix_body(std::ostream& os, const DenseMatrix& a) {
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      if (j) os << ' ';
      os << a(i, j);
    }
    os << '\n';
  }
}

void write_block(std::ostream& os, const DenseMatrix& a) {
  os << a.rows() << ' ' << a.cols() << '\n';
  write_matrix_body(os, a);
}

DenseMatrix read_block(std::istream& is, const PrimeField& f) {
  int r = read_int(is, "block rows");
  int c = read_int(is, "block cols");
  DenseMatrix m(f, r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = read_residue(is, f);
  return m;
}

void write_perm(std::ostream& os, const std::vector<int>& perm) {
  os << perm.size() << '\n';
  for (size_t k = 0; k < perm.size(); ++k) {
    if (k) os << ' ';
    os << perm[k] + 1;
  }
  if (!perm.empty()) os << '\n';
}

std::vector<int> read_perm(std::istream& is, int expect) {
  int r = read_int(is, "permutation length");
  if (r != expect) throw ParseError("permutation length mismatch");
  std::vector<int> perm(size_t(r), 0);
  std::vector<char> seen(size_t(r), 0);
  for (int k = 0; k < r; ++k) {
    int v = read_int(is, "permutation entry");
    if (v < 1 || v > r || seen[v - 1])
      throw ParseError("invalid permutation entry");
    seen[v - 1] = 1;
    perm[k] = v - 1;
  }
  return perm;
}

// Recover the compact echelon form of a column factor read back as dense.
EchelonFactor factor_from_dense(const DenseMatrix& c) {
  EchelonFactor fac;
  fac.dim = c.rows();
  int prev = -1;
  for (int k = 0; k < c.cols(); ++k) {
    int p = 0;
    while (p < c.rows() && c(p, k) == 0) ++p;
    if (p == c.rows()) throw ParseError("echelon factor has a zero column");
    if (p <= prev) throw ParseError("echelon factor pivots not increasing");
    prev = p;
    int last = c.rows() - 1;
    while (last > p && c(last, k) == 0) --last;
    fac.pivot.push_back(p);
    std::vector<uint32_t> run(size_t(last - p) + 1);
    for (int i = p; i <= last; ++i) run[size_t(i - p)] = c(i, k);
    fac.run.push_back(std::move(run));
  }
  return fac;
}

}  // namespace

void write_dense(std::ostream& os, const DenseMatrix& a) {
  os << a.rows() << ' ' << a.cols() << ' ' << a.field().p() << '\n';
  write_matrix_body(os, a);
}

DenseMatrix read_dense(std::istream& is) {
  int m = read_int(is, "rows");
  int n = read_int(is, "cols");
  PrimeField f = read_field(is);
  DenseMatrix a(f, m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = read_residue(is, f);
  return a;
}

void write_sparse(std::ostream& os, const SparseMatrix& a) {
  os << a.rows() << ' ' << a.cols() << ' ' << a.field().p() << ' ' << a.nnz()
     << '\n';
  for (const auto& e : a.entries())
    os << e.row + 1 << ' ' << e.col + 1 << ' ' << e.val << '\n';
}

SparseMatrix read_sparse(std::istream& is) {
  int m = read_int(is, "rows");
  int n = read_int(is, "cols");
  PrimeField f = read_field(is);
  int nnz = read_int(is, "nnz");
  SparseMatrix a(f, m, n);
  try {
    for (int k = 0; k < nnz; ++k) {
      int i = read_int(is, "entry row");
      int j = read_int(is, "entry col");
      uint32_t v = read_residue(is, f);
      a.add_entry(i - 1, j - 1, v);
    }
    a.finalize();
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return a;
}

void write_generator(std::ostream& os, const SSSGenerator& g) {
  os << "SSS " << g.n << ' ' << g.t << ' ' << g.field.p() << ' ' << g.N
     << '\n';
  for (int k = 0; k + 1 < g.N; ++k)
    os << g.lrank[k] << ' ' << g.urank[k] << '\n';
  for (int i = 0; i < g.N; ++i) write_block(os, g.D[i]);
  for (int i = 1; i < g.N; ++i) write_block(os, g.matP(i));
  for (int i = 1; i < g.N - 1; ++i) write_block(os, g.matR(i));
  for (int i = 0; i < g.N - 1; ++i) write_block(os, g.matQ(i));
  for (int i = 0; i < g.N - 1; ++i) write_block(os, g.matU(i));
  for (int i = 1; i < g.N - 1; ++i) write_block(os, g.matW(i));
  for (int i = 1; i < g.N; ++i) write_block(os, g.matV(i));
}

void write_generator(std::ostream& os, const HSSGenerator& g) {
  os << "HSS " << g.n << ' ' << g.t << ' ' << g.field.p() << ' ' << g.K
     << '\n';
  // Per-level inner dimensions, levels K down to 1: row ranks then column
  // ranks of every node.
  for (int k = g.K; k >= 1; --k) {
    const int nk = 1 << k;
    for (int i = 0; i < nk; ++i) {
      int rr = k == g.K ? g.Uleaf[i].cols() : g.R[k + 1][2 * i].cols();
      os << rr << ' ';
    }
    for (int i = 0; i < nk; ++i) {
      int rc = k == g.K ? g.Vleaf[i].rows() : g.W[k + 1][2 * i].rows();
      os << rc << (i + 1 < nk ? " " : "\n");
    }
  }
  for (const auto& d : g.D) write_block(os, d);
  for (const auto& u : g.Uleaf) write_block(os, u);
  for (const auto& v : g.Vleaf) write_block(os, v);
  for (int k = g.K; k >= 2; --k) {
    for (const auto& r : g.R[k]) write_block(os, r);
    for (const auto& w : g.W[k]) write_block(os, w);
  }
  for (int k = g.K; k >= 1; --k)
    for (const auto& b : g.B[k]) write_block(os, b);
}

void write_generator(std::ostream& os, const BruhatGenerator& g) {
  os << "BRU " << g.n << ' ' << g.CL.count() << ' ' << g.CU.count() << ' '
     << g.field.p() << ' ' << g.t << '\n';
  for (int i = 0; i < g.n; ++i) os << g.diag[i] << (i + 1 < g.n ? ' ' : '\n');
  if (g.n == 0) os << '\n';
  write_block(os, g.CL.to_dense(g.field));
  write_perm(os, g.RL);
  write_block(os, g.EL.to_dense(g.field).transposed());
  write_block(os, g.CU.to_dense(g.field));
  write_perm(os, g.RU);
  write_block(os, g.EU.to_dense(g.field).transposed());
}

void write_generator(std::ostream& os, const Generator& g) {
  std::visit([&os](const auto& gen) { write_generator(os, gen); }, g);
}

namespace {

SSSGenerator read_sss(std::istream& is) {
  int n = read_int(is, "n");
  int t = read_int(is, "t");
  PrimeField f = read_field(is);
  int nb = read_int(is, "N");
  if (t < 1 || nb != (n + t - 1) / t) throw ParseError("bad SSS grid");
  SSSGenerator g;
  g.field = f;
  g.n = n;
  g.t = t;
  g.N = nb;
  g.lrank.resize(size_t(std::max(nb - 1, 0)));
  g.urank.resize(size_t(std::max(nb - 1, 0)));
  for (int k = 0; k + 1 < nb; ++k) {
    g.lrank[k] = read_int(is, "lower rank");
    g.urank[k] = read_int(is, "upper rank");
  }
  g.D.assign(size_t(nb), DenseMatrix());
  g.P.assign(size_t(nb), DenseMatrix());
  g.Q.assign(size_t(nb), DenseMatrix());
  g.R.assign(size_t(nb), DenseMatrix());
  g.U.assign(size_t(nb), DenseMatrix());
  g.W.assign(size_t(nb), DenseMatrix());
  g.V.assign(size_t(nb), DenseMatrix());
  for (int i = 0; i < nb; ++i) g.D[i] = read_block(is, f);
  for (int i = 1; i < nb; ++i) g.P[i] = read_block(is, f);
  for (int i = 1; i < nb - 1; ++i) g.R[i] = read_block(is, f);
  for (int i = 0; i < nb - 1; ++i) g.Q[i] = read_block(is, f);
  for (int i = 0; i < nb - 1; ++i) g.U[i] = read_block(is, f);
  for (int i = 1; i < nb - 1; ++i) g.W[i] = read_block(is, f);
  for (int i = 1; i < nb; ++i) g.V[i] = read_block(is, f);
  try {
    g.validate();
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return g;
}

HSSGenerator read_hss(std::istream& is) {
  int n = read_int(is, "n");
  int t = read_int(is, "t");
  PrimeField f = read_field(is);
  int kdepth = read_int(is, "K");
  if (t < 1 || kdepth < 1 || kdepth > 24) throw ParseError("bad HSS tree");
  HSSGenerator g;
  g.field = f;
  g.n = n;
  g.t = t;
  g.K = kdepth;
  g.n_pad = t << kdepth;
  if (g.n_pad < n) throw ParseError("bad HSS tree size");
  const int nl = g.leaves();
  // Rank lines are informative; block headers repeat the dimensions.
  for (int k = g.K; k >= 1; --k)
    for (int i = 0; i < 2 * (1 << k); ++i) read_int(is, "rank");
  g.D.resize(size_t(nl));
  g.Uleaf.resize(size_t(nl));
  g.Vleaf.resize(size_t(nl));
  g.R.assign(size_t(g.K) + 1, {});
  g.W.assign(size_t(g.K) + 1, {});
  g.B.assign(size_t(g.K) + 1, {});
  for (int i = 0; i < nl; ++i) g.D[i] = read_block(is, f);
  for (int i = 0; i < nl; ++i) g.Uleaf[i] = read_block(is, f);
  for (int i = 0; i < nl; ++i) g.Vleaf[i] = read_block(is, f);
  for (int k = g.K; k >= 2; --k) {
    g.R[k].resize(size_t(1) << k);
    g.W[k].resize(size_t(1) << k);
    for (auto& r : g.R[k]) r = read_block(is, f);
    for (auto& w : g.W[k]) w = read_block(is, f);
  }
  for (int k = g.K; k >= 1; --k) {
    g.B[k].resize(size_t(1) << k);
    for (auto& b : g.B[k]) b = read_block(is, f);
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return g;
}

BruhatGenerator read_bru(std::istream& is) {
  int n = read_int(is, "n");
  int u = read_int(is, "u");
  int v = read_int(is, "v");
  PrimeField f = read_field(is);
  int t = read_int(is, "t");
  BruhatGenerator g;
  g.field = f;
  g.n = n;
  g.t = t;
  g.diag.resize(size_t(n));
  for (int i = 0; i < n; ++i) g.diag[i] = read_residue(is, f);
  DenseMatrix cl = read_block(is, f);
  g.RL = read_perm(is, u);
  DenseMatrix el = read_block(is, f);
  DenseMatrix cu = read_block(is, f);
  g.RU = read_perm(is, v);
  DenseMatrix eu = read_block(is, f);
  if (cl.rows() != n || cl.cols() != u || el.rows() != u || el.cols() != n ||
      cu.rows() != n || cu.cols() != v || eu.rows() != v || eu.cols() != n)
    throw ParseError("bad Bruhat factor dimensions");
  g.CL = factor_from_dense(cl);
  g.EL = factor_from_dense(el.transposed());
  g.CU = factor_from_dense(cu);
  g.EU = factor_from_dense(eu.transposed());
  return g;
}

}  // namespace

Generator read_generator(std::istream& is) {
  std::string tag;
  if (!(is >> tag)) throw ParseError("empty generator file");
  if (tag == "SSS") return read_sss(is);
  if (tag == "HSS") return read_hss(is);
  if (tag == "BRU") return read_bru(is);
  throw ParseError("unknown generator tag '" + tag + "'");
}

MatrixFileKind probe_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file " + path);
  std::istringstream ls(line);
  int64_t x;
  int count = 0;
  while (ls >> x) ++count;
  if (count == 3) return MatrixFileKind::Dense;
  if (count == 4) return MatrixFileKind::Sparse;
  throw ParseError("unrecognized matrix header in " + path);
}

DenseMatrix read_dense_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_dense(in);
}

SparseMatrix read_sparse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_sparse(in);
}

Generator read_generator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_generator(in);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
  if (!out) throw ParseError("write failed for " + path);
}

std::string dense_to_string(const DenseMatrix& a) {
  std::ostringstream os;
  write_dense(os, a);
  return os.str();
}

std::string sparse_to_string(const SparseMatrix& a) {
  std::ostringstream os;
  write_sparse(os, a);
  return os.str();
}

std::string generator_to_string(const Generator& g) {
  std::ostringstream os;
  write_generator(os, g);
  return os.str();
}

}  // namespace qsep
