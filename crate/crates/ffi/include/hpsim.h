#ifndef HPSIM_H
#define HPSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HpsimStatus {
  HPSIM_STATUS_OK = 0,
  HPSIM_STATUS_NULL_POINTER = 1,
  HPSIM_STATUS_INVALID_ARGUMENT = 2,
  HPSIM_STATUS_NUMERICAL = 3,
  HPSIM_STATUS_DEGENERATE_RULE = 4,
  HPSIM_STATUS_NO_TARGET = 5,
  HPSIM_STATUS_IO = 6,
  HPSIM_STATUS_PANIC = 7,
} HpsimStatus;

typedef enum HpsimScenario {
  HPSIM_SCENARIO_TWO_QUBIT_X = 0,
  HPSIM_SCENARIO_THREE_QUBIT_P = 1,
  /**
   * Uses the `n` argument.
   */
  HPSIM_SCENARIO_GSUM_X = 2,
  /**
   * Uses the `n` argument.
   */
  HPSIM_SCENARIO_N_QUBIT_P = 3,
} HpsimScenario;

typedef enum HpsimQuadrature {
  HPSIM_QUADRATURE_X = 0,
  HPSIM_QUADRATURE_P = 1,
} HpsimQuadrature;

typedef enum HpsimPhase {
  HPSIM_PHASE_EXACT = 0,
  HPSIM_PHASE_LITERAL = 1,
  HPSIM_PHASE_SUPPRESSED = 2,
} HpsimPhase;

typedef enum HpsimCoherence {
  HPSIM_COHERENCE_TRACED = 0,
  HPSIM_COHERENCE_IGNORED = 1,
} HpsimCoherence;

/**
 * Opaque homodyne decision rule.
 */
typedef struct HpsimRule HpsimRule;

/**
 * Opaque atom-pulse-environment state.
 */
typedef struct HpsimState HpsimState;

/**
 * Detunings, coupling and decay rates in units of the cavity decay rate.
 */
typedef struct HpsimCavityParams {
  double delta1;
  double delta2;
  double g;
  double kappa;
  double gamma;
} HpsimCavityParams;

typedef struct HpsimComplex {
  double re;
  double im;
} HpsimComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, statically allocated. Do not free.
 */
const char *hpsim_version(void);

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread. Do not free.
 */
const char *hpsim_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void hpsim_string_free(char *s);

/**
 * Reflection coefficient for atomic level `level` (0 or 1).
 *
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum HpsimStatus hpsim_reflection_coefficient(const struct HpsimCavityParams *params,
                                              uint32_t level,
                                              struct HpsimComplex *out);

/**
 * Lossless parameters giving reflection phases `(pi/n, -pi/n)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HpsimStatus hpsim_solve_params(size_t n, struct HpsimCavityParams *out);

/**
 * Atoms in `|+>^n`, pulse in `|alpha>`.
 *
 * # Safety
 * `out` must be a valid pointer; the handle it receives is owned by the caller.
 */
enum HpsimStatus hpsim_state_init(size_t n, double alpha, struct HpsimState **out);

/**
 * Ideal output of `n` CPS gates with phases `(pi/n, -pi/n)`.
 *
 * # Safety
 * `out` must be a valid pointer; the handle it receives is owned by the caller.
 */
enum HpsimStatus hpsim_state_closed_form(size_t n, double alpha, struct HpsimState **out);

/**
 * Full pipeline: initial state, `n` CPS gates tuned for `(pi/n, -pi/n)`
 * at emission rate `gamma`, channel loss `eta_sq`, and the matching
 * decision rule. Either output may be null if not wanted.
 *
 * # Safety
 * Non-null out-pointers must be valid; received handles are owned by the caller.
 */
enum HpsimStatus hpsim_prepare(enum HpsimScenario kind,
                               size_t n,
                               double alpha,
                               double eta_sq,
                               double gamma,
                               struct HpsimState **out_state,
                               struct HpsimRule **out_rule);

/**
 * # Safety
 * `state` must be null or a handle from this library, freed once.
 */
void hpsim_state_free(struct HpsimState *state);

/**
 * Reflects the pulse off the cavity of `qubit`, in place.
 *
 * # Safety
 * `state` must be a valid handle.
 */
enum HpsimStatus hpsim_state_apply_cps(struct HpsimState *state,
                                       size_t qubit,
                                       struct HpsimComplex r0,
                                       struct HpsimComplex r1);

/**
 * Channel of amplitude transmission `eta`, in place.
 *
 * # Safety
 * `state` must be a valid handle.
 */
enum HpsimStatus hpsim_state_apply_loss(struct HpsimState *state, double eta);

/**
 * Qubit count of the state.
 *
 * # Safety
 * `state` and `out` must be valid pointers.
 */
enum HpsimStatus hpsim_state_qubits(const struct HpsimState *state, size_t *out);

/**
 * JSON rendering of the branch table. Free with [`hpsim_string_free`].
 *
 * # Safety
 * `state` and `out` must be valid pointers.
 */
enum HpsimStatus hpsim_state_to_json(const struct HpsimState *state, char **out);

/**
 * Parses a branch table written by [`hpsim_state_to_json`].
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum HpsimStatus hpsim_state_from_json(const char *json, struct HpsimState **out);

/**
 * Homodyne outcome density at `v`.
 *
 * # Safety
 * `state` and `out` must be valid pointers.
 */
enum HpsimStatus hpsim_outcome_density(const struct HpsimState *state,
                                       enum HpsimQuadrature q,
                                       double v,
                                       double *out);

/**
 * Draws `count` outcomes into `buf` from a generator seeded by `seed`.
 *
 * # Safety
 * `state` must be valid and `buf` must hold `count` doubles.
 */
enum HpsimStatus hpsim_sample_outcomes(const struct HpsimState *state,
                                       enum HpsimQuadrature q,
                                       uint64_t seed,
                                       size_t count,
                                       double *buf);

/**
 * Decision rule for `kind` (`n` is read by the n-qubit scenarios) with
 * input amplitude `alpha` and channel amplitude transmission `eta`.
 *
 * # Safety
 * `out` must be a valid pointer; the handle it receives is owned by the caller.
 */
enum HpsimStatus hpsim_rule_build(enum HpsimScenario kind,
                                  size_t n,
                                  double alpha,
                                  double eta,
                                  struct HpsimRule **out);

/**
 * # Safety
 * `rule` must be null or a handle from this library, freed once.
 */
void hpsim_rule_free(struct HpsimRule *rule);

/**
 * Number of outcome classes.
 *
 * # Safety
 * `rule` and `out` must be valid pointers.
 */
enum HpsimStatus hpsim_rule_class_count(const struct HpsimRule *rule, size_t *out);

/**
 * Index of the class containing outcome `v`.
 *
 * # Safety
 * `rule` and `out` must be valid pointers.
 */
enum HpsimStatus hpsim_rule_classify(const struct HpsimRule *rule, double v, size_t *out);

/**
 * Target name of a class, e.g. `GHZ(3)`. Free with [`hpsim_string_free`].
 *
 * # Safety
 * `rule` and `out` must be valid pointers.
 */
enum HpsimStatus hpsim_rule_class_name(const struct HpsimRule *rule, size_t class_, char **out);

/**
 * Probability that the outcome lands in `class`.
 *
 * # Safety
 * `state`, `rule` and `out` must be valid pointers.
 */
enum HpsimStatus hpsim_success_probability(const struct HpsimState *state,
                                           const struct HpsimRule *rule,
                                           size_t class_,
                                           double *out);

/**
 * Average fidelity of the atoms with the class target.
 *
 * # Safety
 * `state`, `rule` and `out` must be valid pointers.
 */
enum HpsimStatus hpsim_fidelity(const struct HpsimState *state,
                                const struct HpsimRule *rule,
                                size_t class_,
                                enum HpsimPhase phase,
                                enum HpsimCoherence coherence,
                                double *out);

/**
 * Two-qubit success probability and fidelity per class, lossless cavities.
 *
 * # Safety
 * `success_prob` and `fidelity` must be valid pointers.
 */
enum HpsimStatus hpsim_closed_form_two_qubit(double alpha,
                                             double eta,
                                             double *success_prob,
                                             double *fidelity);

/**
 * `n / 2^{n-1}`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HpsimStatus hpsim_w_state_success(size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HPSIM_H */
