#ifndef DICTGREEDY_H
#define DICTGREEDY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  DG_STATUS_OK = 0,
  DG_STATUS_NULL_POINTER = 1,
  DG_STATUS_INVALID_INPUT = 2,
  DG_STATUS_UNSUPPORTED = 3,
  DG_STATUS_BUDGET = 4,
  DG_STATUS_NON_COERCIVE = 5,
  DG_STATUS_INSUFFICIENT_DATA = 6,
  DG_STATUS_IO = 7,
  DG_STATUS_INTERNAL = 8,
} DgStatus;

typedef enum {
  DG_ALGORITHM_REGA = 0,
  DG_ALGORITHM_EGAFR = 1,
  DG_ALGORITHM_EGA_C = 2,
  DG_ALGORITHM_WRGA = 3,
  DG_ALGORITHM_WGAFR = 4,
} DgAlgorithm;

typedef struct DgDictionary DgDictionary;

typedef struct DgOracle DgOracle;

typedef struct DgTrace DgTrace;

// Objective callback: value at `x[0..dim]`.
typedef double (*DgObjectiveFn)(void *user_data, const double *x, size_t dim);

// Options for [`dg_run`]. Start from [`dg_run_options_default`].
typedef struct {
  uint64_t iterations;
  uint32_t ls_depth;
  // Corruption bound; 0 for exact values.
  double delta;
  uint64_t seed;
  double half_width;
  // Weakness parameter of WRGA and WGAFR.
  double weakness;
  // Smoothness order for EGA(C); 0 takes it from the objective.
  double q;
  // Smoothness constant for EGA(C); 0 takes it from the objective.
  double gamma;
} DgRunOptions;

// One trace row. Parameters an algorithm does not use are NaN.
typedef struct {
  uint64_t iteration;
  uint64_t atom;
  double objective;
  double observed;
  double lambda;
  double w;
  double alpha;
  double beta;
  double l1_mass;
  uint64_t support;
  uint64_t evals;
  double delta_eff;
} DgRecord;

// Univariate callback for [`dg_line_search`].
typedef double (*DgScalarFn)(void *user_data, double x);

typedef struct {
  double x_best;
  double f_best;
  uint64_t eval_count;
  double certified_gap;
} DgLineSearchResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the next
// failing call on the same thread.
const char *dg_last_error(void);

// Library version as a static NUL-terminated string.
const char *dg_version(void);

// `{+e_1, -e_1, ..., +e_dim, -e_dim}` in the `p` norm (`INFINITY` allowed).
//
// # Safety
// `out` must be a valid pointer.
DgStatus dg_dictionary_canonical(size_t dim, double p, DgDictionary **out);

// Symmetric dictionary from `count` row-major atoms of length `dim`. Atoms
// are normalized in the `p` norm and missing negations are added.
//
// # Safety
// `atoms` must hold `count * dim` values and `out` must be valid.
DgStatus dg_dictionary_from_atoms(const double *atoms,
                                  size_t count,
                                  size_t dim,
                                  double p,
                                  DgDictionary **out);

// Number of atoms, 0 for null.
//
// # Safety
// `dict` must be null or a live handle.
size_t dg_dictionary_len(const DgDictionary *dict);

// # Safety
// `dict` must be null or a handle not yet freed.
void dg_dictionary_free(DgDictionary *dict);

// `||x - center||_2^2`.
//
// # Safety
// `center` must hold `dim` values and `out` must be valid.
DgStatus dg_oracle_quadratic(const double *center, size_t dim, DgOracle **out);

// `sum |x_i - center_i|^q` for `q` in `(1, 2]`.
//
// # Safety
// `center` must hold `dim` values and `out` must be valid.
DgStatus dg_oracle_power(const double *center, size_t dim, double q, DgOracle **out);

// Objective given by a C callback, without gradient or smoothness data, so
// only REGA and EGAFR run on it. Algorithms call `f` from several threads
// concurrently; it must be thread-safe and `user_data` must outlive the
// oracle.
//
// # Safety
// `out` must be valid; `f` must be safe to call with any `dim`-vector.
DgStatus dg_oracle_callback(size_t dim, DgObjectiveFn f, void *user_data, DgOracle **out);

// Exact value at `x`; counts one evaluation.
//
// # Safety
// `x` must hold the oracle's dimension of values; `value` must be valid.
DgStatus dg_oracle_evaluate(const DgOracle *oracle, const double *x, double *value);

// Evaluations counted so far, 0 for null.
//
// # Safety
// `oracle` must be null or a live handle.
uint64_t dg_oracle_eval_count(const DgOracle *oracle);

// # Safety
// `oracle` must be null or a handle not yet freed.
void dg_oracle_free(DgOracle *oracle);

DgRunOptions dg_run_options_default(void);

// Runs one algorithm, given as a [`DgAlgorithm`] value. `options` may be
// null for the defaults.
//
// # Safety
// Handles must be live; `out` must be valid.
DgStatus dg_run(const DgOracle *oracle,
                const DgDictionary *dict,
                uint32_t algorithm,
                const DgRunOptions *options,
                DgTrace **out);

// Number of recorded iterations, 0 for null.
//
// # Safety
// `trace` must be null or a live handle.
size_t dg_trace_len(const DgTrace *trace);

// Objective value at the origin.
//
// # Safety
// `trace` must be null or a live handle.
double dg_trace_initial_objective(const DgTrace *trace);

// Row `index` (0-based) of the trace.
//
// # Safety
// `trace` must be a live handle and `out` valid.
DgStatus dg_trace_record(const DgTrace *trace, size_t index, DgRecord *out);

// Dense coefficients of row `index` over the dictionary, written into
// `buffer[0..len]`; `len` must equal the dictionary size.
//
// # Safety
// `buffer` must hold `len` values.
DgStatus dg_trace_coefficients(const DgTrace *trace, size_t index, double *buffer, size_t len);

// The trace as JSON; free with [`dg_string_free`].
//
// # Safety
// `trace` must be a live handle and `out` valid.
DgStatus dg_trace_to_json(const DgTrace *trace, char **out);

// # Safety
// `s` must be null or a string returned by this library.
void dg_string_free(char *s);

// # Safety
// `trace` must be null or a handle not yet freed.
void dg_trace_free(DgTrace *trace);

// Minimizes a convex `f` on `[lo, hi]` with `depth` halvings. Values may be
// off by up to `delta`.
//
// # Safety
// `out` must be valid.
DgStatus dg_line_search(DgScalarFn f,
                        void *user_data,
                        double lo,
                        double hi,
                        uint32_t depth,
                        double delta,
                        DgLineSearchResult *out);

// Runs a JSON experiment config and writes its outputs to `out_dir` (or
// the config's own directory when null). Returns `Internal` when a run
// failed or an invariant was violated; outputs are still written.
//
// # Safety
// Strings must be NUL-terminated.
DgStatus dg_run_experiment(const char *config_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DICTGREEDY_H */
