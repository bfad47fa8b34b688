#ifndef BIGRADE_H
#define BIGRADE_H

/* Generated by cbindgen; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BigradeStatus {
  BIGRADE_STATUS_OK = 0,
  BIGRADE_STATUS_NULL_ARGUMENT = 1,
  BIGRADE_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed generators, bad prime, invalid window, or an ideal that is not m-primary.
   */
  BIGRADE_STATUS_INVALID_INPUT = 3,
  BIGRADE_STATUS_FIT_UNSTABLE = 4,
  /**
   * Any other failure inside the engine, including failed internal cross-checks.
   */
  BIGRADE_STATUS_COMPUTATION = 5,
  BIGRADE_STATUS_OUT_OF_RANGE = 6,
  BIGRADE_STATUS_BUFFER_TOO_SMALL = 7,
  BIGRADE_STATUS_PANIC = 8,
} BigradeStatus;

typedef enum BigradeVerdictKind {
  BIGRADE_VERDICT_KIND_FINITE = 0,
  BIGRADE_VERDICT_KIND_INFINITE_DETECTED = 1,
  BIGRADE_VERDICT_KIND_INCONCLUSIVE = 2,
} BigradeVerdictKind;

/**
 * Opaque session handle.
 */
typedef struct BigradeSession BigradeSession;

/**
 * Session settings. Obtain defaults from [`bigrade_options_default`].
 */
typedef struct BigradeOptions {
  uint32_t prime;
  /**
   * Truncation order; 0 derives it from the inputs.
   */
  uint32_t order;
  uint32_t r_max;
  uint32_t s_max;
  uint32_t k_min;
  uint32_t k_max;
  /**
   * When false the seed is derived from the inputs.
   */
  bool has_seed;
  uint64_t seed;
} BigradeOptions;

typedef struct BigradeCoefficients {
  int64_t e20;
  int64_t e11;
  int64_t e02;
  int64_t e10;
  int64_t e01;
  int64_t e00;
} BigradeCoefficients;

typedef struct BigradeVerdict {
  enum BigradeVerdictKind kind;
  /**
   * Length for `Finite`, detected slope for `InfiniteDetected`, 0 otherwise.
   */
  uint64_t value;
} BigradeVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default settings: prime 32003, derived order, 8x8 window, k in 4..=10, derived seed.
 */
struct BigradeOptions bigrade_options_default(void);

/**
 * Creates a session for the ideals `first` and `second`, given as comma separated
 * generators such as `"x^2, x*y, y^2"`. `options` may be null for defaults.
 *
 * # Safety
 * `first` and `second` must be nul-terminated strings; `options` null or valid;
 * `out_session` writable.
 */
enum BigradeStatus bigrade_session_new(const char *first,
                                       const char *second,
                                       const struct BigradeOptions *options,
                                       struct BigradeSession **out_session);

/**
 * # Safety
 * `session` must come from [`bigrade_session_new`] and not be used afterwards. Null is ignored.
 */
void bigrade_session_free(struct BigradeSession *session);

/**
 * The message of the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *bigrade_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void bigrade_string_free(char *s);

/**
 * The truncation order currently in use; it grows if a computation needed more.
 *
 * # Safety
 * `session` valid, `out_order` writable.
 */
enum BigradeStatus bigrade_session_order(struct BigradeSession *session, uint32_t *out_order);

/**
 * The seed used for random joint reductions.
 *
 * # Safety
 * `session` valid, `out_seed` writable.
 */
enum BigradeStatus bigrade_session_seed(struct BigradeSession *session, uint64_t *out_seed);

/**
 * `λ(R/I^r J^s)` for `(r,s)` inside the window.
 *
 * # Safety
 * `session` valid, `out_length` writable.
 */
enum BigradeStatus bigrade_length(struct BigradeSession *session,
                                  uint32_t r,
                                  uint32_t s,
                                  uint64_t *out_length);

/**
 * Copies the whole table row-major into `buffer`, `(r_max+1)*(s_max+1)` entries.
 * With a null `buffer` only `out_len` is filled in.
 *
 * # Safety
 * `session` valid, `buffer` null or writable for `capacity` entries, `out_len` writable.
 */
enum BigradeStatus bigrade_length_table(struct BigradeSession *session,
                                        uint64_t *buffer,
                                        size_t capacity,
                                        size_t *out_len);

/**
 * The six bigraded coefficients.
 *
 * # Safety
 * `session` valid, `out_coefficients` writable.
 */
enum BigradeStatus bigrade_coefficients(struct BigradeSession *session,
                                        struct BigradeCoefficients *out_coefficients);

/**
 * The full coefficient report as JSON; free with [`bigrade_string_free`].
 *
 * # Safety
 * `session` valid, `out_json` writable.
 */
enum BigradeStatus bigrade_coefficients_json(struct BigradeSession *session, char **out_json);

/**
 * Classifies `λ(H^2(r,s))` from the lengths of the Koszul-type quotients.
 *
 * # Safety
 * `session` valid, `out_verdict` writable.
 */
enum BigradeStatus bigrade_classify_h2(struct BigradeSession *session,
                                       uint32_t r,
                                       uint32_t s,
                                       struct BigradeVerdict *out_verdict);

/**
 * Runs every verification block. The report is returned as JSON (free with
 * [`bigrade_string_free`]); `out_passed` tells whether all asserted blocks agree.
 *
 * # Safety
 * `session` valid, `out_json` writable, `out_passed` null or writable.
 */
enum BigradeStatus bigrade_verify_json(struct BigradeSession *session,
                                       char **out_json,
                                       bool *out_passed);

/**
 * Library version as a static string.
 */
const char *bigrade_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIGRADE_H */
