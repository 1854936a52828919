#ifndef DEMON_OPT_H
#define DEMON_OPT_H

/* Generated by cbindgen from demon-opt-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum DemonOptStatus {
  DEMON_OPT_STATUS_OK = 0,
  DEMON_OPT_STATUS_NULL_POINTER = 1,
  DEMON_OPT_STATUS_INVALID_UTF8 = 2,
  DEMON_OPT_STATUS_INVALID_ARGUMENT = 3,
  DEMON_OPT_STATUS_DOMAIN_ERROR = 4,
  DEMON_OPT_STATUS_DIMENSION_MISMATCH = 5,
  DEMON_OPT_STATUS_NON_FINITE = 6,
} DemonOptStatus;

/**
 * Opaque schedule handle.
 */
typedef struct DemonOptSchedule DemonOptSchedule;

/**
 * Opaque optimizer-state handle: parameters, momentum and second-moment
 * buffers, and the step counter.
 */
typedef struct DemonOptState DemonOptState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the most recent error message for this thread into `buf`
 * (NUL-terminated, truncated to `len`). Returns the full message length in
 * bytes, excluding the terminator.
 */
uintptr_t demon_opt_last_error_message(char *buf, uintptr_t len);

/**
 * Decaying-momentum coefficient at iteration `t` of `total`.
 */
enum DemonOptStatus demon_opt_demon_beta(double t, double total, double beta_init, double *out);

/**
 * Theory momentum schedule `(t+1) / (t (t+2))`, defined for `t >= 1`.
 */
enum DemonOptStatus demon_opt_demon_theory_beta(double t, double *out);

/**
 * Parse a schedule description from a JSON record (same shape as the
 * library's config files). On success writes a handle that must be freed
 * with [`demon_opt_schedule_free`].
 */
enum DemonOptStatus demon_opt_schedule_parse_json(const char *json, struct DemonOptSchedule **out);

/**
 * Evaluate a parsed schedule at iteration `t` of `total`. Plateau
 * schedules are stateful and not evaluable through this entry point.
 */
enum DemonOptStatus demon_opt_schedule_eval(const struct DemonOptSchedule *schedule,
                                            double t,
                                            double total,
                                            double *out);

/**
 * Release a schedule handle. A null pointer is a no-op.
 */
void demon_opt_schedule_free(struct DemonOptSchedule *schedule);

/**
 * Create optimizer state with the given starting parameters and zeroed
 * buffers. Free with [`demon_opt_state_free`].
 */
enum DemonOptStatus demon_opt_state_new(const double *theta,
                                        uintptr_t dim,
                                        struct DemonOptState **out);

/**
 * Parameter count of a state handle (0 for null).
 */
uintptr_t demon_opt_state_dim(const struct DemonOptState *state);

/**
 * Update-call counter of a state handle (0 for null).
 */
uint64_t demon_opt_state_step(const struct DemonOptState *state);

/**
 * Copy the current parameters into `buf` (length must equal the state dim).
 */
enum DemonOptStatus demon_opt_state_theta(const struct DemonOptState *state,
                                          double *buf,
                                          uintptr_t len);

/**
 * Release a state handle. A null pointer is a no-op.
 */
void demon_opt_state_free(struct DemonOptState *state);

/**
 * One SGDM update with an externally scheduled momentum coefficient
 * (`beta = 0` is plain SGD).
 */
enum DemonOptStatus demon_opt_sgdm_step(struct DemonOptState *state,
                                        const double *g,
                                        uintptr_t len,
                                        double eta,
                                        double beta,
                                        double weight_decay);

/**
 * One decaying-momentum SGDM update at iteration `t` of `total`.
 */
enum DemonOptStatus demon_opt_demon_sgdm_step(struct DemonOptState *state,
                                              const double *g,
                                              uintptr_t len,
                                              double eta,
                                              double beta_init,
                                              uintptr_t t,
                                              uintptr_t total,
                                              double weight_decay);

/**
 * One decaying-momentum Adam update at iteration `t` of `total`.
 */
enum DemonOptStatus demon_opt_demon_adam_step(struct DemonOptState *state,
                                              const double *g,
                                              uintptr_t len,
                                              double eta,
                                              double beta_init,
                                              uintptr_t t,
                                              uintptr_t total,
                                              double beta2,
                                              double epsilon,
                                              double weight_decay);

/**
 * One bias-corrected Adam update.
 */
enum DemonOptStatus demon_opt_adam_step(struct DemonOptState *state,
                                        const double *g,
                                        uintptr_t len,
                                        double eta,
                                        double beta1,
                                        double beta2,
                                        double epsilon,
                                        double weight_decay);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEMON_OPT_H */
