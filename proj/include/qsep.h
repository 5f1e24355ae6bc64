/* C interface to the qsep exact quasiseparable-matrix library.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Functions return QSEP_OK (0) on success or a nonzero error code;
 * qsep_last_error() describes the most recent failure on the calling
 * thread.  Output handles are written only on success.
 */
#ifndef QSEP_H
#define QSEP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct qsep_dense qsep_dense;
typedef struct qsep_sparse qsep_sparse;
typedef struct qsep_gen qsep_gen;

enum qsep_status {
  QSEP_OK = 0,
  QSEP_ERR_USAGE = 2,       /* invalid arguments / unsupported combination */
  QSEP_ERR_PARSE = 3,       /* malformed input file */
  QSEP_ERR_ORDER = 4,       /* factorization rank exceeded the block size */
  QSEP_ERR_MONTE_CARLO = 5, /* randomized construction failed after retries */
  QSEP_ERR_SHAPE = 6,
  QSEP_ERR_SINGULAR = 7,
  QSEP_ERR_DIV_ZERO = 8,
  QSEP_ERR_GRID = 9, /* SSS operands on different grids */
  QSEP_ERR_IO = 10,
  QSEP_ERR_INTERNAL = 11
};

enum qsep_gen_kind {
  QSEP_GEN_SSS = 0,
  QSEP_GEN_HSS = 1,
  QSEP_GEN_BRUHAT = 2
};

/* Thread-local message for the last failing call. */
const char* qsep_last_error(void);

/* Nonzero iff p is usable as a modulus (odd prime below 2^31). */
int qsep_field_ok(uint32_t p);

/* ---- dense matrices ---- */
int qsep_dense_create(uint32_t p, int rows, int cols, qsep_dense** out);
void qsep_dense_free(qsep_dense* m);
int qsep_dense_rows(const qsep_dense* m);
int qsep_dense_cols(const qsep_dense* m);
uint32_t qsep_dense_p(const qsep_dense* m);
int qsep_dense_get(const qsep_dense* m, int i, int j, uint32_t* out);
int qsep_dense_set(qsep_dense* m, int i, int j, uint32_t v);
int qsep_dense_equal(const qsep_dense* a, const qsep_dense* b, int* eq);
int qsep_dense_read(const char* path, qsep_dense** out);
int qsep_dense_write(const qsep_dense* m, const char* path);
int qsep_dense_random(uint32_t p, int rows, int cols, uint64_t seed,
                      qsep_dense** out);

/* ---- sparse matrices ---- */
void qsep_sparse_free(qsep_sparse* m);
int qsep_sparse_rows(const qsep_sparse* m);
int qsep_sparse_cols(const qsep_sparse* m);
size_t qsep_sparse_nnz(const qsep_sparse* m);
int qsep_sparse_read(const char* path, qsep_sparse** out);
int qsep_sparse_write(const qsep_sparse* m, const char* path);
int qsep_sparse_densify(const qsep_sparse* m, qsep_dense** out);

/* ---- quasiseparable instances and order ---- */
int qsep_random_qs_dense(uint32_t p, int n, int s, uint64_t seed,
                         qsep_dense** out);
int qsep_random_qs_sparse(uint32_t p, int n, int s, double density,
                          uint64_t seed, qsep_sparse** out);
/* Exact quasiseparable order (naive definition-based computation). */
int qsep_qs_order(const qsep_dense* a, int* s);

/* ---- generators ---- */
int qsep_build_sss(const qsep_dense* a, int t, qsep_gen** out);
int qsep_build_hss(const qsep_dense* a, int t, qsep_gen** out);
int qsep_build_bruhat(const qsep_dense* a, qsep_gen** out);
/* s bounds the quasiseparable order of a; seed drives the sketches. */
int qsep_build_bruhat_sparse(const qsep_sparse* a, int s, uint64_t seed,
                             qsep_gen** out);
void qsep_gen_free(qsep_gen* g);
int qsep_gen_kind(const qsep_gen* g);
int qsep_gen_n(const qsep_gen* g);
/* Block size for SSS/HSS; measured overlapping parameter for Bruhat. */
int qsep_gen_block(const qsep_gen* g);
int qsep_gen_storage(const qsep_gen* g, size_t* elems);
int qsep_gen_expand(const qsep_gen* g, qsep_dense** out);
/* c += expand(g) * b */
int qsep_gen_apply(const qsep_gen* g, const qsep_dense* b, qsep_dense* c);
/* Same-format sum: SSS (same grid) or Bruhat (any orders). */
int qsep_gen_add(const qsep_gen* a, const qsep_gen* b, qsep_gen** out);
/* SSS x SSS product on the same grid. */
int qsep_gen_mul(const qsep_gen* a, const qsep_gen* b, qsep_gen** out);
int qsep_gen_read(const char* path, qsep_gen** out);
int qsep_gen_write(const qsep_gen* g, const char* path);

/* ---- benchmark harness ----
 * Times the requested kernels over the (op, format, s, rep) grid and writes
 * CSV rows "op,format,n,s,t,rep,seconds,storage_elems".  formats, ops and
 * s_list are comma-separated.  Instances are regenerated per rep from
 * seed + rep; timing covers the kernel call only. */
int qsep_bench_csv(const char* formats, const char* ops, int n,
                   const char* s_list, int reps, uint64_t seed, uint32_t p,
                   int v, const char* csv_path);

#ifdef __cplusplus
}
#endif

#endif /* QSEP_H */
