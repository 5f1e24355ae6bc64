// Command-line front end for the qsep library: instance generation, format
// construction and conversion, apply/add/mul drivers, exact verification,
// and the benchmark harness.  Talks to the library through the C API only.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 malformed input file, 4 order exceeded, 5 Monte Carlo failure.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsep.h"

namespace {

constexpr uint32_t kDefaultP = 131071;

int map_status(int rc) {
  switch (rc) {
    case QSEP_OK:
      return 0;
    case QSEP_ERR_PARSE:
      return 3;
    case QSEP_ERR_ORDER:
      return 4;
    case QSEP_ERR_MONTE_CARLO:
      return 5;
    default:
      return 2;
  }
}

[[noreturn]] void die(int rc) {
  std::fprintf(stderr, "qstool: %s\n", qsep_last_error());
  std::exit(map_status(rc));
}

void check(int rc) {
  if (rc != QSEP_OK) die(rc);
}

struct DenseHandle {
  qsep_dense* p = nullptr;
  ~DenseHandle() { qsep_dense_free(p); }
};
struct SparseHandle {
  qsep_sparse* p = nullptr;
  ~SparseHandle() { qsep_sparse_free(p); }
};
struct GenHandle {
  qsep_gen* p = nullptr;
  ~GenHandle() { qsep_gen_free(p); }
};

bool file_is_sparse(const std::string& path) {
  // Dense headers carry 3 integers, sparse 4.
  std::FILE* fp = std::fopen(path.c_str(), "r");
  if (!fp) {
    std::fprintf(stderr, "qstool: cannot open %s\n", path.c_str());
    std::exit(3);
  }
  char line[256] = {0};
  if (!std::fgets(line, sizeof line, fp)) {
    std::fclose(fp);
    std::fprintf(stderr, "qstool: empty file %s\n", path.c_str());
    std::exit(3);
  }
  std::fclose(fp);
  long long a, b, c, d;
  return std::sscanf(line, "%lld %lld %lld %lld", &a, &b, &c, &d) == 4;
}

// Loads a matrix file as dense, densifying sparse input.
void load_as_dense(const std::string& path, DenseHandle& out) {
  if (file_is_sparse(path)) {
    SparseHandle sp;
    check(qsep_sparse_read(path.c_str(), &sp.p));
    check(qsep_sparse_densify(sp.p, &out.p));
  } else {
    check(qsep_dense_read(path.c_str(), &out.p));
  }
}

int default_block(const std::string& format, const qsep_dense* a) {
  int order = 0;
  check(qsep_qs_order(a, &order));
  if (format == "hss") return std::max(2 * order, 2);
  return std::max(order, 1);
}

void build_from_file(const std::string& format, const std::string& in,
                     int block, int s_bound, uint64_t seed, GenHandle& gen) {
  const bool sparse_in = file_is_sparse(in);
  if (format == "bruhat" && sparse_in) {
    SparseHandle sp;
    check(qsep_sparse_read(in.c_str(), &sp.p));
    int s = s_bound;
    if (s < 0) {
      DenseHandle d;
      check(qsep_sparse_densify(sp.p, &d.p));
      check(qsep_qs_order(d.p, &s));
    }
    check(qsep_build_bruhat_sparse(sp.p, s, seed, &gen.p));
    return;
  }
  DenseHandle a;
  load_as_dense(in, a);
  if (format == "bruhat") {
    check(qsep_build_bruhat(a.p, &gen.p));
  } else {
    int t = block > 0 ? block : default_block(format, a.p);
    if (format == "sss")
      check(qsep_build_sss(a.p, t, &gen.p));
    else
      check(qsep_build_hss(a.p, t, &gen.p));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact quasiseparable matrix toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate a random instance");
  int gen_n = 256, gen_s = 8;
  uint64_t gen_seed = 1;
  uint32_t gen_p = kDefaultP;
  double gen_density = -1.0;
  std::string gen_out;
  gen_cmd->add_option("--n", gen_n, "dimension");
  gen_cmd->add_option("--s", gen_s, "quasiseparable order");
  gen_cmd->add_option("--seed", gen_seed, "random seed");
  gen_cmd->add_option("--field-p", gen_p, "field modulus");
  gen_cmd->add_option("--density", gen_density,
                      "sparse fill fraction; omit for a dense instance");
  gen_cmd->add_option("--out", gen_out, "output file")->required();

  // build
  auto* build_cmd = app.add_subcommand("build", "construct a generator");
  std::string build_format, build_in, build_out;
  int build_block = 0, build_s = -1;
  uint64_t build_seed = 1;
  build_cmd->add_option("--format", build_format, "sss|hss|bruhat")
      ->required()
      ->check(CLI::IsMember({"sss", "hss", "bruhat"}));
  build_cmd->add_option("--in", build_in, "matrix file")->required();
  build_cmd->add_option("--block", build_block,
                        "block size (default: measured order for sss, twice "
                        "the order for hss)");
  build_cmd->add_option("--s", build_s,
                        "order bound for the sparse bruhat path");
  build_cmd->add_option("--seed", build_seed, "sketch seed");
  build_cmd->add_option("--out", build_out, "generator file")->required();

  // expand
  auto* expand_cmd = app.add_subcommand("expand", "expand a generator");
  std::string expand_in, expand_out;
  expand_cmd->add_option("--in", expand_in, "generator file")->required();
  expand_cmd->add_option("--out", expand_out, "dense output")->required();

  // apply
  auto* apply_cmd =
      app.add_subcommand("apply", "multiply a generator by a block vector");
  std::string apply_in, apply_rhs, apply_out;
  apply_cmd->add_option("--in", apply_in, "generator file")->required();
  apply_cmd->add_option("--rhs", apply_rhs, "dense right-hand side")
      ->required();
  apply_cmd->add_option("--out", apply_out, "dense output")->required();

  // add / mul
  auto* add_cmd = app.add_subcommand("add", "sum of two generators");
  std::vector<std::string> add_in;
  std::string add_out;
  add_cmd->add_option("--in", add_in, "two generator files")
      ->required()
      ->expected(2);
  add_cmd->add_option("--out", add_out, "generator file")->required();

  auto* mul_cmd = app.add_subcommand("mul", "product of two SSS generators");
  std::vector<std::string> mul_in;
  std::string mul_out;
  mul_cmd->add_option("--in", mul_in, "two generator files")
      ->required()
      ->expected(2);
  mul_cmd->add_option("--out", mul_out, "generator file")->required();

  // order
  auto* order_cmd =
      app.add_subcommand("order", "print the exact quasiseparable order");
  std::string order_in;
  order_cmd->add_option("--in", order_in, "matrix file")->required();

  // verify
  auto* verify_cmd = app.add_subcommand(
      "verify", "check expand(build(A)) == A for a matrix file");
  std::string verify_format, verify_in;
  int verify_block = 0, verify_s = -1;
  uint64_t verify_seed = 1;
  verify_cmd->add_option("--format", verify_format, "sss|hss|bruhat")
      ->required()
      ->check(CLI::IsMember({"sss", "hss", "bruhat"}));
  verify_cmd->add_option("--in", verify_in, "matrix file")->required();
  verify_cmd->add_option("--block", verify_block, "block size");
  verify_cmd->add_option("--s", verify_s, "order bound for sparse input");
  verify_cmd->add_option("--seed", verify_seed, "sketch seed");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "timing sweep, CSV output");
  std::string bench_formats = "sss,hss,bruhat", bench_ops = "build,apply";
  std::string bench_s = "8,16,32", bench_csv;
  int bench_n = 1024, bench_reps = 5, bench_v = 64;
  uint64_t bench_seed = 1;
  uint32_t bench_p = kDefaultP;
  bench_cmd->add_option("--format", bench_formats, "comma-separated formats");
  bench_cmd->add_option("--ops", bench_ops, "comma-separated ops");
  bench_cmd->add_option("--n", bench_n, "dimension");
  bench_cmd->add_option("--s", bench_s, "comma-separated order list");
  bench_cmd->add_option("--reps", bench_reps, "repetitions per cell");
  bench_cmd->add_option("--seed", bench_seed, "instance seed base");
  bench_cmd->add_option("--field-p", bench_p, "field modulus");
  bench_cmd->add_option("--v", bench_v, "block-vector width for apply");
  bench_cmd->add_option("--csv", bench_csv, "output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (gen_cmd->parsed()) {
    if (gen_density >= 0.0) {
      SparseHandle sp;
      check(qsep_random_qs_sparse(gen_p, gen_n, gen_s, gen_density, gen_seed,
                                  &sp.p));
      check(qsep_sparse_write(sp.p, gen_out.c_str()));
    } else {
      DenseHandle d;
      check(qsep_random_qs_dense(gen_p, gen_n, gen_s, gen_seed, &d.p));
      check(qsep_dense_write(d.p, gen_out.c_str()));
    }
    return 0;
  }

  if (build_cmd->parsed()) {
    GenHandle g;
    build_from_file(build_format, build_in, build_block, build_s, build_seed,
                    g);
    check(qsep_gen_write(g.p, build_out.c_str()));
    return 0;
  }

  if (expand_cmd->parsed()) {
    GenHandle g;
    check(qsep_gen_read(expand_in.c_str(), &g.p));
    DenseHandle d;
    check(qsep_gen_expand(g.p, &d.p));
    check(qsep_dense_write(d.p, expand_out.c_str()));
    return 0;
  }

  if (apply_cmd->parsed()) {
    GenHandle g;
    check(qsep_gen_read(apply_in.c_str(), &g.p));
    DenseHandle b;
    check(qsep_dense_read(apply_rhs.c_str(), &b.p));
    DenseHandle c;
    check(qsep_dense_create(qsep_dense_p(b.p), qsep_dense_rows(b.p),
                            qsep_dense_cols(b.p), &c.p));
    check(qsep_gen_apply(g.p, b.p, c.p));
    check(qsep_dense_write(c.p, apply_out.c_str()));
    return 0;
  }

  if (add_cmd->parsed() || mul_cmd->parsed()) {
    const auto& ins = add_cmd->parsed() ? add_in : mul_in;
    const auto& outp = add_cmd->parsed() ? add_out : mul_out;
    GenHandle a, b, r;
    check(qsep_gen_read(ins[0].c_str(), &a.p));
    check(qsep_gen_read(ins[1].c_str(), &b.p));
    if (add_cmd->parsed())
      check(qsep_gen_add(a.p, b.p, &r.p));
    else
      check(qsep_gen_mul(a.p, b.p, &r.p));
    check(qsep_gen_write(r.p, outp.c_str()));
    return 0;
  }

  if (order_cmd->parsed()) {
    DenseHandle d;
    load_as_dense(order_in, d);
    int s = 0;
    check(qsep_qs_order(d.p, &s));
    std::printf("%d\n", s);
    return 0;
  }

  if (verify_cmd->parsed()) {
    GenHandle g;
    build_from_file(verify_format, verify_in, verify_block, verify_s,
                    verify_seed, g);
    DenseHandle expanded, reference;
    check(qsep_gen_expand(g.p, &expanded.p));
    load_as_dense(verify_in, reference);
    int eq = 0;
    check(qsep_dense_equal(expanded.p, reference.p, &eq));
    if (eq) {
      std::printf("ok\n");
      return 0;
    }
    std::printf("MISMATCH\n");
    return 1;
  }

  if (bench_cmd->parsed()) {
    check(qsep_bench_csv(bench_formats.c_str(), bench_ops.c_str(), bench_n,
                         bench_s.c_str(), bench_reps, bench_seed, bench_p,
                         bench_v, bench_csv.c_str()));
    return 0;
  }

  return 2;
}
