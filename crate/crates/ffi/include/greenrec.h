#ifndef GREENREC_H
#define GREENREC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which artifact to serialize.
 */
typedef enum GrArtifact {
  GrArtifact_Ode = 0,
  GrArtifact_Large = 1,
  GrArtifact_Small = 2,
} GrArtifact;

/**
 * Branch that produced a derivative sequence.
 */
typedef enum GrBranch {
  GrBranch_Large = 0,
  GrBranch_Small = 1,
} GrBranch;

/**
 * Evaluation arithmetic.
 */
typedef enum GrPrecision {
  GrPrecision_Double = 0,
  GrPrecision_Extended = 1,
} GrPrecision;

/**
 * Status codes returned by every fallible function.
 */
typedef enum GrStatus {
  GrStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  GrStatus_NullPointer = 1,
  /**
   * Malformed input text or invalid configuration.
   */
  GrStatus_InvalidArgument = 2,
  /**
   * Point outside the kernel's domain.
   */
  GrStatus_Domain = 3,
  /**
   * The request is not supported for this kernel or operator.
   */
  GrStatus_Capability = 4,
  /**
   * A numerical step failed (singular or degenerate recurrence).
   */
  GrStatus_Numerical = 5,
  /**
   * Output buffer too small.
   */
  GrStatus_BufferTooSmall = 6,
  /**
   * Internal error or caught panic.
   */
  GrStatus_Internal = 7,
} GrStatus;

/**
 * Opaque set of derived artifacts: ODE, large and small recurrences.
 */
typedef struct GrDerived GrDerived;

/**
 * Opaque derivative evaluator bound to one kernel.
 */
typedef struct GrEvaluator GrEvaluator;

/**
 * Hybrid evaluation settings. Obtain defaults from [`gr_hybrid_default`].
 */
typedef struct GrHybridConfig {
  /**
   * Switch to the small branch when `x̄ / |x1|` exceeds this value.
   */
  double xi;
  /**
   * Truncation order of the small-branch Taylor expansion.
   */
  uintptr_t p_small;
  enum GrPrecision precision;
} GrHybridConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the last error message on this thread, or an empty string.
 * Writes at most `len` bytes including the terminating NUL and returns the
 * full message length (excluding NUL). `buf` may be null to query the length.
 */
uintptr_t gr_last_error_message(char *buf, uintptr_t len);

/**
 * Default hybrid settings.
 */
struct GrHybridConfig gr_hybrid_default(void);

/**
 * Create an evaluator for a builtin kernel by name. `k` is used only when
 * `has_k` is nonzero.
 */
enum GrStatus gr_evaluator_new(const char *kernel,
                               double k,
                               int32_t has_k,
                               struct GrEvaluator **out);

/**
 * Release an evaluator. Null is ignored.
 */
void gr_evaluator_free(struct GrEvaluator *ev);

/**
 * Spatial dimension of the evaluator's kernel, 0 for null.
 */
uintptr_t gr_evaluator_dimension(const struct GrEvaluator *ev);

/**
 * Derivatives `∂^j_{x1} G(x)` for `j = 0..=p` into `out_re`/`out_im`, each
 * of length `out_len ≥ p + 1`. `x` holds `dim` coordinates. `cfg` may be
 * null for defaults; `branch` may be null.
 */
enum GrStatus gr_evaluate(const struct GrEvaluator *ev,
                          const double *x,
                          uintptr_t dim,
                          uintptr_t p,
                          const struct GrHybridConfig *cfg,
                          double *out_re,
                          double *out_im,
                          uintptr_t out_len,
                          enum GrBranch *branch);

/**
 * Derive the ODE and both recurrences from a PDE spec document.
 */
enum GrStatus gr_derive(const char *spec_document, struct GrDerived **out);

/**
 * Release derived artifacts. Null is ignored.
 */
void gr_derived_free(struct GrDerived *d);

/**
 * Shift range of the large recurrence. Either output may be null.
 */
enum GrStatus gr_derived_shifts(const struct GrDerived *d, int32_t *min_shift, int32_t *max_shift);

/**
 * Serialize one artifact to its text form. The returned string is owned by
 * the caller and released with [`gr_string_free`].
 */
enum GrStatus gr_derived_artifact(const struct GrDerived *d, enum GrArtifact which, char **out);

/**
 * Release a string returned by the library. Null is ignored.
 */
void gr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GREENREC_H */
