#ifndef PPT_FORGE_H
#define PPT_FORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum PfStatus {
  PF_STATUS_OK = 0,
  PF_STATUS_NULL_POINTER = 1,
  PF_STATUS_INVALID_VECTOR = 2,
  PF_STATUS_DOMAIN = 3,
  PF_STATUS_PRECONDITION = 4,
  PF_STATUS_UNSUPPORTED = 5,
  PF_STATUS_DIMENSION_GUARD = 6,
  PF_STATUS_SOLVER = 7,
  PF_STATUS_IO = 8,
  PF_STATUS_JSON = 9,
  PF_STATUS_INVALID_UTF8 = 10,
  PF_STATUS_BUFFER_TOO_SMALL = 11,
  PF_STATUS_PANIC = 12,
} PfStatus;

typedef enum PfDecision {
  PF_DECISION_FEASIBLE = 0,
  PF_DECISION_INFEASIBLE = 1,
  PF_DECISION_BOUNDARY = 2,
} PfDecision;

typedef enum PfRule {
  PF_RULE_NIELSEN = 0,
  PF_RULE_RANK_FAST_PATH = 1,
  PF_RULE_MONOTONE_S12 = 2,
  PF_RULE_BORDERLINE = 3,
  PF_RULE_RANK3_EXACT = 4,
  PF_RULE_CSTAR_D = 5,
  PF_RULE_T1_LOWER_BOUND = 6,
  PF_RULE_SDP_T = 7,
} PfRule;

/**
 * Opaque SDP certificate.
 */
typedef struct PfCertificate PfCertificate;

/**
 * Opaque Schmidt coefficient vector.
 */
typedef struct PfSchmidtVector PfSchmidtVector;

/**
 * Opaque feasibility verdict.
 */
typedef struct PfVerdict PfVerdict;

/**
 * PPT monotones of a pure state, all in bits.
 */
typedef struct PfMonotones {
  double e_c;
  double e_d;
  double e_xd;
  double e_xc;
} PfMonotones;

typedef struct PfBounds {
  double lower;
  double upper;
} PfBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a vector from `len` coefficients. They must be non-negative and sum
 * to 1; order does not matter.
 *
 * # Safety
 * `coeffs` must point to `len` readable doubles and `out` must be writable.
 */
enum PfStatus pf_vector_new(const double *coeffs, uintptr_t len, struct PfSchmidtVector **out);

/**
 * Parses a comma separated list such as `"0.05,0.05,0.9"` or `"1/4,3/4"`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` must be writable.
 */
enum PfStatus pf_vector_parse(const char *text, struct PfSchmidtVector **out);

/**
 * Number of stored coefficients, or 0 for a null handle.
 *
 * # Safety
 * `v` must be null or a handle from `pf_vector_new`/`pf_vector_parse`.
 */
uintptr_t pf_vector_len(const struct PfSchmidtVector *v);

/**
 * Copies the coefficients in ascending order into `buf`.
 *
 * # Safety
 * `v` must be a live handle and `buf` must have room for `cap` doubles.
 */
enum PfStatus pf_vector_coeffs(const struct PfSchmidtVector *v, double *buf, uintptr_t cap);

/**
 * # Safety
 * `v` must be null or a handle not yet freed.
 */
void pf_vector_free(struct PfSchmidtVector *v);

/**
 * Rényi entropy in bits. Pass `INFINITY` for the min-entropy.
 *
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum PfStatus pf_renyi_entropy(const struct PfSchmidtVector *v, double t, double *out);

/**
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum PfStatus pf_monotones(const struct PfSchmidtVector *v, struct PfMonotones *out);

/**
 * Sets `*out` to whether `lambda ≺ mu`, i.e. `lambda → mu` is possible by
 * LOCC.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum PfStatus pf_majorizes(const struct PfSchmidtVector *lambda,
                           const struct PfSchmidtVector *mu,
                           bool *out);

/**
 * Closed-form lower bound `T₁(K; λ)`. Requires `k ≥ 2`.
 *
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum PfStatus pf_t1_value(const struct PfSchmidtVector *v, uintptr_t k, double *out);

/**
 * Analytic lower and upper bounds on the SDP value.
 *
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum PfStatus pf_bounds(const struct PfSchmidtVector *v, uintptr_t k, struct PfBounds *out);

/**
 * Solves the reduced SDP for `T(K; λ)` and returns a certificate handle.
 *
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum PfStatus pf_sdp_solve(const struct PfSchmidtVector *v,
                           uintptr_t k,
                           struct PfCertificate **out);

/**
 * Primal objective, or NaN for a null handle.
 *
 * # Safety
 * `c` must be null or a live certificate handle.
 */
double pf_certificate_value(const struct PfCertificate *c);

/**
 * Duality gap, or NaN for a null handle.
 *
 * # Safety
 * `c` must be null or a live certificate handle.
 */
double pf_certificate_gap(const struct PfCertificate *c);

/**
 * # Safety
 * `c` must be null or a live certificate handle.
 */
bool pf_certificate_is_optimal(const struct PfCertificate *c);

/**
 * Serializes the certificate. Free the string with `pf_string_free`.
 *
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum PfStatus pf_certificate_json(const struct PfCertificate *c, char **out);

/**
 * # Safety
 * `c` must be null or a handle not yet freed.
 */
void pf_certificate_free(struct PfCertificate *c);

/**
 * Decides `Φ_K → target` under PPT operations.
 *
 * # Safety
 * `target` must be a live handle and `out` writable.
 */
enum PfStatus pf_decide_ppt(uintptr_t k,
                            const struct PfSchmidtVector *target,
                            struct PfVerdict **out);

/**
 * Decides `source → target` under LOCC.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum PfStatus pf_decide_locc(const struct PfSchmidtVector *source,
                             const struct PfSchmidtVector *target,
                             struct PfVerdict **out);

/**
 * # Safety
 * `v` must be a live verdict handle and `out` writable.
 */
enum PfStatus pf_verdict_decision(const struct PfVerdict *v, enum PfDecision *out);

/**
 * # Safety
 * `v` must be a live verdict handle and `out` writable.
 */
enum PfStatus pf_verdict_rule(const struct PfVerdict *v, enum PfRule *out);

/**
 * Writes the value `T` behind the verdict. Sets `*has_value` to false and
 * leaves `*out` untouched when the deciding rule did not compute one.
 *
 * # Safety
 * `v` must be a live verdict handle; `out` and `has_value` writable.
 */
enum PfStatus pf_verdict_t(const struct PfVerdict *v, double *out, bool *has_value);

/**
 * Serializes the verdict. Free the string with `pf_string_free`.
 *
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum PfStatus pf_verdict_json(const struct PfVerdict *v, char **out);

/**
 * # Safety
 * `v` must be null or a handle not yet freed.
 */
void pf_verdict_free(struct PfVerdict *v);

/**
 * Whether some maximally entangled catalyst enables `Φ_K → λ` under PPT.
 *
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum PfStatus pf_catalysis_possible(uintptr_t k, const struct PfSchmidtVector *v, bool *out);

/**
 * Smallest catalyst rank `C ≤ budget` that works, or 0 if none was found.
 *
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum PfStatus pf_minimal_catalyst_rank(uintptr_t k,
                                       const struct PfSchmidtVector *v,
                                       uintptr_t budget,
                                       uintptr_t *out);

/**
 * Message for the last failed call on this thread, or null if the last call
 * succeeded. Free the copy with `pf_string_free`.
 */
char *pf_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void pf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PPT_FORGE_H */
