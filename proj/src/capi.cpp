#include "qsep.h"

#include <fstream>
#include <string>

#include "qsep/bench.hpp"
#include "qsep/bruhat.hpp"
#include "qsep/hss.hpp"
#include "qsep/io.hpp"
#include "qsep/qsgen.hpp"
#include "qsep/sss.hpp"

struct qsep_dense {
  qsep::DenseMatrix m;
};
struct qsep_sparse {
  qsep::SparseMatrix m;
};
struct qsep_gen {
  qsep::Generator g;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* msg) {
  g_last_error = msg;
  return code;
}

int translate(const std::exception& e) {
  using namespace qsep;
  g_last_error = e.what();
  if (dynamic_cast<const ParseError*>(&e)) return QSEP_ERR_PARSE;
  if (dynamic_cast<const OrderExceeded*>(&e)) return QSEP_ERR_ORDER;
  if (dynamic_cast<const MonteCarloFailure*>(&e)) return QSEP_ERR_MONTE_CARLO;
  if (dynamic_cast<const ShapeError*>(&e)) return QSEP_ERR_SHAPE;
  if (dynamic_cast<const SingularError*>(&e)) return QSEP_ERR_SINGULAR;
  if (dynamic_cast<const DivisionByZero*>(&e)) return QSEP_ERR_DIV_ZERO;
  if (dynamic_cast<const GridError*>(&e)) return QSEP_ERR_GRID;
  if (dynamic_cast<const ParamError*>(&e)) return QSEP_ERR_USAGE;
  if (dynamic_cast<const Error*>(&e)) return QSEP_ERR_INTERNAL;
  return QSEP_ERR_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return translate(e);
  } catch (...) {
    return fail(QSEP_ERR_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* qsep_last_error(void) { return g_last_error.c_str(); }

int qsep_field_ok(uint32_t p) {
  try {
    qsep::PrimeField f(p);
    (void)f;
    return 1;
  } catch (...) {
    return 0;
  }
}

int qsep_dense_create(uint32_t p, int rows, int cols, qsep_dense** out) {
  return guarded([&] {
    if (!out || rows < 0 || cols < 0)
      return fail(QSEP_ERR_USAGE, "bad arguments");
    qsep::PrimeField f(p);
    *out = new qsep_dense{qsep::DenseMatrix(f, rows, cols)};
    return int(QSEP_OK);
  });
}

void qsep_dense_free(qsep_dense* m) { delete m; }

int qsep_dense_rows(const qsep_dense* m) { return m ? m->m.rows() : 0; }
int qsep_dense_cols(const qsep_dense* m) { return m ? m->m.cols() : 0; }
uint32_t qsep_dense_p(const qsep_dense* m) {
  return m ? m->m.field().p() : 0;
}

int qsep_dense_get(const qsep_dense* m, int i, int j, uint32_t* out) {
  if (!m || !out || i < 0 || j < 0 || i >= m->m.rows() || j >= m->m.cols())
    return fail(QSEP_ERR_USAGE, "index out of range");
  *out = m->m(i, j);
  return QSEP_OK;
}

int qsep_dense_set(qsep_dense* m, int i, int j, uint32_t v) {
  if (!m || i < 0 || j < 0 || i >= m->m.rows() || j >= m->m.cols())
    return fail(QSEP_ERR_USAGE, "index out of range");
  if (v >= m->m.field().p())
    return fail(QSEP_ERR_USAGE, "residue out of range");
  m->m(i, j) = v;
  return QSEP_OK;
}

int qsep_dense_equal(const qsep_dense* a, const qsep_dense* b, int* eq) {
  if (!a || !b || !eq) return fail(QSEP_ERR_USAGE, "null argument");
  *eq = a->m == b->m ? 1 : 0;
  return QSEP_OK;
}

int qsep_dense_read(const char* path, qsep_dense** out) {
  return guarded([&] {
    if (!path || !out) return fail(QSEP_ERR_USAGE, "null argument");
    *out = new qsep_dense{qsep::read_dense_file(path)};
    return int(QSEP_OK);
  });
}

int qsep_dense_write(const qsep_dense* m, const char* path) {
  return guarded([&] {
    if (!m || !path) return fail(QSEP_ERR_USAGE, "null argument");
    qsep::write_text_file(path, qsep::dense_to_string(m->m));
    return int(QSEP_OK);
  });
}

int qsep_dense_random(uint32_t p, int rows, int cols, uint64_t seed,
                      qsep_dense** out) {
  return guarded([&] {
    if (!out || rows < 0 || cols < 0)
      return fail(QSEP_ERR_USAGE, "bad arguments");
    qsep::PrimeField f(p);
    qsep::SeededRng rng(seed);
    *out = new qsep_dense{qsep::DenseMatrix::random(f, rows, cols, rng)};
    return int(QSEP_OK);
  });
}

void qsep_sparse_free(qsep_sparse* m) { delete m; }

int qsep_sparse_rows(const qsep_sparse* m) { return m ? m->m.rows() : 0; }
int qsep_sparse_cols(const qsep_sparse* m) { return m ? m->m.cols() : 0; }
size_t qsep_sparse_nnz(const qsep_sparse* m) { return m ? m->m.nnz() : 0; }

int qsep_sparse_read(const char* path, qsep_sparse** out) {
  return guarded([&] {
    if (!path || !out) return fail(QSEP_ERR_USAGE, "null argument");
    *out = new qsep_sparse{qsep::read_sparse_file(path)};
    return int(QSEP_OK);
  });
}

int qsep_sparse_write(const qsep_sparse* m, const char* path) {
  return guarded([&] {
    if (!m || !path) return fail(QSEP_ERR_USAGE, "null argument");
    qsep::write_text_file(path, qsep::sparse_to_string(m->m));
    return int(QSEP_OK);
  });
}

int qsep_sparse_densify(const qsep_sparse* m, qsep_dense** out) {
  return guarded([&] {
    if (!m || !out) return fail(QSEP_ERR_USAGE, "null argument");
    *out = new qsep_dense{qsep::densify(m->m)};
    return int(QSEP_OK);
  });
}

int qsep_random_qs_dense(uint32_t p, int n, int s, uint64_t seed,
                         qsep_dense** out) {
  return guarded([&] {
    if (!out) return fail(QSEP_ERR_USAGE, "null argument");
    qsep::PrimeField f(p);
    qsep::SeededRng rng(seed);
    *out = new qsep_dense{qsep::random_qs_dense(f, n, s, rng)};
    return int(QSEP_OK);
  });
}

int qsep_random_qs_sparse(uint32_t p, int n, int s, double density,
                          uint64_t seed, qsep_sparse** out) {
  return guarded([&] {
    if (!out) return fail(QSEP_ERR_USAGE, "null argument");
    qsep::PrimeField f(p);
    qsep::SeededRng rng(seed);
    *out = new qsep_sparse{qsep::random_qs_sparse(f, n, s, density, rng)};
    return int(QSEP_OK);
  });
}

int qsep_qs_order(const qsep_dense* a, int* s) {
  return guarded([&] {
    if (!a || !s) return fail(QSEP_ERR_USAGE, "null argument");
    *s = qsep::qs_order(a->m);
    return int(QSEP_OK);
  });
}

int qsep_build_sss(const qsep_dense* a, int t, qsep_gen** out) {
  return guarded([&] {
    if (!a || !out) return fail(QSEP_ERR_USAGE, "null argument");
    *out = new qsep_gen{qsep::sss_from_dense(a->m, t)};
    return int(QSEP_OK);
  });
}

int qsep_build_hss(const qsep_dense* a, int t, qsep_gen** out) {
  return guarded([&] {
    if (!a || !out) return fail(QSEP_ERR_USAGE, "null argument");
    *out = new qsep_gen{qsep::hss_from_dense(a->m, t)};
    return int(QSEP_OK);
  });
}

int qsep_build_bruhat(const qsep_dense* a, qsep_gen** out) {
  return guarded([&] {
    if (!a || !out) return fail(QSEP_ERR_USAGE, "null argument");
    *out = new qsep_gen{qsep::bruhat_from_dense(a->m)};
    return int(QSEP_OK);
  });
}

int qsep_build_bruhat_sparse(const qsep_sparse* a, int s, uint64_t seed,
                             qsep_gen** out) {
  return guarded([&] {
    if (!a || !out) return fail(QSEP_ERR_USAGE, "null argument");
    *out = new qsep_gen{qsep::bruhat_from_sparse(a->m, s, seed)};
    return int(QSEP_OK);
  });
}

void qsep_gen_free(qsep_gen* g) { delete g; }

int qsep_gen_kind(const qsep_gen* g) {
  if (!g) return -1;
  if (std::holds_alternative<qsep::SSSGenerator>(g->g)) return QSEP_GEN_SSS;
  if (std::holds_alternative<qsep::HSSGenerator>(g->g)) return QSEP_GEN_HSS;
  return QSEP_GEN_BRUHAT;
}

int qsep_gen_n(const qsep_gen* g) {
  if (!g) return 0;
  return std::visit([](const auto& gen) { return gen.n; }, g->g);
}

int qsep_gen_block(const qsep_gen* g) {
  if (!g) return 0;
  return std::visit([](const auto& gen) { return gen.t; }, g->g);
}

int qsep_gen_storage(const qsep_gen* g, size_t* elems) {
  if (!g || !elems) return fail(QSEP_ERR_USAGE, "null argument");
  *elems = std::visit([](const auto& gen) { return gen.storage(); }, g->g);
  return QSEP_OK;
}

int qsep_gen_expand(const qsep_gen* g, qsep_dense** out) {
  return guarded([&] {
    if (!g || !out) return fail(QSEP_ERR_USAGE, "null argument");
    qsep::DenseMatrix m;
    if (auto* s = std::get_if<qsep::SSSGenerator>(&g->g))
      m = qsep::sss_expand(*s);
    else if (auto* h = std::get_if<qsep::HSSGenerator>(&g->g))
      m = qsep::hss_expand(*h);
    else
      m = qsep::bruhat_expand(std::get<qsep::BruhatGenerator>(g->g));
    *out = new qsep_dense{std::move(m)};
    return int(QSEP_OK);
  });
}

int qsep_gen_apply(const qsep_gen* g, const qsep_dense* b, qsep_dense* c) {
  return guarded([&] {
    if (!g || !b || !c) return fail(QSEP_ERR_USAGE, "null argument");
    if (auto* s = std::get_if<qsep::SSSGenerator>(&g->g))
      c->m = qsep::sss_apply(*s, b->m, c->m);
    else if (auto* h = std::get_if<qsep::HSSGenerator>(&g->g))
      c->m = qsep::hss_apply(*h, b->m, c->m);
    else
      c->m = qsep::bruhat_apply(std::get<qsep::BruhatGenerator>(g->g), b->m,
                                c->m);
    return int(QSEP_OK);
  });
}

int qsep_gen_add(const qsep_gen* a, const qsep_gen* b, qsep_gen** out) {
  return guarded([&] {
    if (!a || !b || !out) return fail(QSEP_ERR_USAGE, "null argument");
    if (auto* sa = std::get_if<qsep::SSSGenerator>(&a->g)) {
      auto* sb = std::get_if<qsep::SSSGenerator>(&b->g);
      if (!sb) return fail(QSEP_ERR_USAGE, "format mismatch in add");
      *out = new qsep_gen{qsep::sss_add(*sa, *sb)};
      return int(QSEP_OK);
    }
    if (auto* ba = std::get_if<qsep::BruhatGenerator>(&a->g)) {
      auto* bb = std::get_if<qsep::BruhatGenerator>(&b->g);
      if (!bb) return fail(QSEP_ERR_USAGE, "format mismatch in add");
      *out = new qsep_gen{qsep::bruhat_add(*ba, *bb)};
      return int(QSEP_OK);
    }
    return fail(QSEP_ERR_USAGE, "add is not available for HSS generators");
  });
}

int qsep_gen_mul(const qsep_gen* a, const qsep_gen* b, qsep_gen** out) {
  return guarded([&] {
    if (!a || !b || !out) return fail(QSEP_ERR_USAGE, "null argument");
    auto* sa = std::get_if<qsep::SSSGenerator>(&a->g);
    auto* sb = std::get_if<qsep::SSSGenerator>(&b->g);
    if (!sa || !sb)
      return fail(QSEP_ERR_USAGE, "mul is only available for SSS generators");
    *out = new qsep_gen{qsep::sss_mul(*sa, *sb)};
    return int(QSEP_OK);
  });
}

int qsep_gen_read(const char* path, qsep_gen** out) {
  return guarded([&] {
    if (!path || !out) return fail(QSEP_ERR_USAGE, "null argument");
    *out = new qsep_gen{qsep::read_generator_file(path)};
    return int(QSEP_OK);
  });
}

int qsep_gen_write(const qsep_gen* g, const char* path) {
  return guarded([&] {
    if (!g || !path) return fail(QSEP_ERR_USAGE, "null argument");
    qsep::write_text_file(path, qsep::generator_to_string(g->g));
    return int(QSEP_OK);
  });
}

int qsep_bench_csv(const char* formats, const char* ops, int n,
                   const char* s_list, int reps, uint64_t seed, uint32_t p,
                   int v, const char* csv_path) {
  return guarded([&] {
    if (!formats || !ops || !s_list || !csv_path)
      return fail(QSEP_ERR_USAGE, "null argument");
    auto split = [](const char* text) {
      std::vector<std::string> parts;
      std::string cur;
      for (const char* c = text; *c; ++c) {
        if (*c == ',') {
          if (!cur.empty()) parts.push_back(cur);
          cur.clear();
        } else {
          cur += *c;
        }
      }
      if (!cur.empty()) parts.push_back(cur);
      return parts;
    };
    qsep::BenchParams params;
    params.formats = split(formats);
    params.ops = split(ops);
    params.n = n;
    params.s_list.clear();
    for (const auto& tok : split(s_list)) params.s_list.push_back(std::stoi(tok));
    params.reps = reps;
    params.seed = seed;
    params.p = p;
    params.v = v;
    if (params.formats.empty() || params.ops.empty() ||
        params.s_list.empty() || reps < 1)
      return fail(QSEP_ERR_USAGE, "empty benchmark grid");
    auto recs = qsep::bench_run(params);
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) return fail(QSEP_ERR_IO, "cannot write CSV file");
    qsep::bench_write_csv(out, recs);
    return int(QSEP_OK);
  });
}

}  // extern "C"
