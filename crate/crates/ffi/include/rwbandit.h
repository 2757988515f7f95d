#ifndef RWBANDIT_H
#define RWBANDIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RwEstimator {
  // Shifted trajectory estimator with implicit exploration.
  RW_ESTIMATOR_SHIFTED = 0,
  // Trajectory estimator without shift.
  RW_ESTIMATOR_COVERED = 1,
  // Played node only.
  RW_ESTIMATOR_STANDARD = 2,
} RwEstimator;

typedef enum RwStatus {
  RW_STATUS_OK = 0,
  RW_STATUS_NULL_POINTER = 1,
  RW_STATUS_INVALID_CHAIN = 2,
  RW_STATUS_DIMENSION = 3,
  RW_STATUS_PARAMETER = 4,
  RW_STATUS_SINGULAR = 5,
  RW_STATUS_SEQUENCING = 6,
  RW_STATUS_IO = 7,
  // Output buffer too short; the needed length is reported.
  RW_STATUS_BUFFER_TOO_SMALL = 8,
  RW_STATUS_OTHER = 9,
  RW_STATUS_PANIC = 10,
} RwStatus;

typedef struct RwChain RwChain;

typedef struct RwExp3 RwExp3;

// Random walk simulator: a chain plus its own random stream.
typedef struct RwSim RwSim;

typedef struct RwUcb RwUcb;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty if none. Valid
// until the next failing call on the same thread.
const char *rw_last_error(void);

// Library version as a static string.
const char *rw_version(void);

// Build a validated chain from a row-major `k * k` transition matrix.
//
// # Safety
// `m` must point to `k * k` doubles; `out` must be writable.
enum RwStatus rw_chain_new(size_t k, const double *m, double rho, struct RwChain **out);

// Load a chain from a TOML chain file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum RwStatus rw_chain_load(const char *path, struct RwChain **out);

// # Safety
// `chain` must come from `rw_chain_new`/`rw_chain_load` or be null.
void rw_chain_free(struct RwChain *chain);

// Number of transient nodes, or 0 for a null handle.
//
// # Safety
// `chain` must be a live handle or null.
size_t rw_chain_k(const struct RwChain *chain);

// Expected hitting times into `out[0..K]`.
//
// # Safety
// `lengths` as in the module docs; `out` must hold `K` doubles.
enum RwStatus rw_chain_hitting_times(const struct RwChain *chain,
                                     const double *lengths,
                                     double *out);

// Per-node hitting centrality into `alpha[0..K]` and the coverage factor
// into `kappa_out`. Either output may be null.
//
// # Safety
// Non-null outputs must be writable with the stated lengths.
enum RwStatus rw_chain_centrality(const struct RwChain *chain, double *alpha, double *kappa_out);

// Smallest truncation level `B` with `K T rho^B / (1 - rho) <= eps`.
//
// # Safety
// `out` must be writable.
enum RwStatus rw_chain_b_param(const struct RwChain *chain,
                               size_t horizon,
                               double eps,
                               uint32_t *out);

// Simulator over a copy of `chain`, seeded with `(seed, stream)`.
//
// # Safety
// `chain` must be live; `out` writable.
enum RwStatus rw_sim_new(const struct RwChain *chain,
                         uint64_t seed,
                         uint64_t stream,
                         struct RwSim **out);

// # Safety
// `sim` must come from `rw_sim_new` or be null.
void rw_sim_free(struct RwSim *sim);

// Walk from `start` until absorption.
//
// Writes the visited transient nodes to `visits` and the length of the
// edge leaving each to `edge_lengths`, both of capacity `cap`, and the
// visit count to `hops`. When `cap` is too short, `hops` receives the
// required length and nothing else is written.
//
// # Safety
// `lengths` as in the module docs; buffers must hold `cap` elements.
enum RwStatus rw_sim_walk(struct RwSim *sim,
                          const double *lengths,
                          size_t start,
                          size_t *visits,
                          double *edge_lengths,
                          size_t cap,
                          size_t *hops);

// Trajectory-feedback UCB for `chain`; `played_only` restricts samples to
// the played node.
//
// # Safety
// `chain` must be live; `out` writable.
enum RwStatus rw_ucb_new(const struct RwChain *chain, bool played_only, struct RwUcb **out);

// # Safety
// `ucb` must come from `rw_ucb_new` or be null.
void rw_ucb_free(struct RwUcb *ucb);

// Node to play this epoch.
//
// # Safety
// `ucb` must be live; `node` writable.
enum RwStatus rw_ucb_select(const struct RwUcb *ucb, size_t *node);

// Record this epoch's trajectory (layout as produced by `rw_sim_walk`).
//
// # Safety
// `visits` and `edge_lengths` must hold `hops` elements.
enum RwStatus rw_ucb_observe(struct RwUcb *ucb,
                             const size_t *visits,
                             const double *edge_lengths,
                             size_t hops);

// Current hitting-time estimates into `estimates[0..K]` and indices into
// `indices[0..K]`; either may be null.
//
// # Safety
// Non-null outputs must hold `K` doubles.
enum RwStatus rw_ucb_state(const struct RwUcb *ucb, double *estimates, double *indices);

// EXP3 over `k` nodes. `b` and `beta` are used by the shifted estimator
// only.
//
// # Safety
// `out` must be writable.
enum RwStatus rw_exp3_new(size_t k,
                          double eta,
                          enum RwEstimator estimator,
                          double b,
                          double beta,
                          struct RwExp3 **out);

// Shifted-estimator EXP3 with default parameters for `chain`, `horizon`
// and truncation target `eps`.
//
// # Safety
// `chain` must be live; `out` writable.
enum RwStatus rw_exp3_with_defaults(const struct RwChain *chain,
                                    size_t horizon,
                                    double eps,
                                    struct RwExp3 **out);

// # Safety
// `exp3` must come from an `rw_exp3_*` constructor or be null.
void rw_exp3_free(struct RwExp3 *exp3);

// Current sampling distribution into `probs[0..K]`.
//
// # Safety
// `probs` must hold `K` doubles.
enum RwStatus rw_exp3_probs(const struct RwExp3 *exp3, double *probs);

// Draw the node to play using the simulator's random stream.
//
// # Safety
// Handles must be live; `node` writable.
enum RwStatus rw_exp3_select(struct RwExp3 *exp3, struct RwSim *sim, size_t *node);

// Record this epoch's trajectory (layout as produced by `rw_sim_walk`).
//
// # Safety
// `visits` and `edge_lengths` must hold `hops` elements.
enum RwStatus rw_exp3_observe(struct RwExp3 *exp3,
                              const size_t *visits,
                              const double *edge_lengths,
                              size_t hops);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RWBANDIT_H */
