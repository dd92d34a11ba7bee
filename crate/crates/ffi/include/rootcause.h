#ifndef ROOTCAUSE_H
#define ROOTCAUSE_H

/* Generated by cbindgen from rootcause-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes returned by every API call.
 */
typedef enum RcStatus {
  /**
   * Success.
   */
  RC_STATUS_OK = 0,
  /**
   * Success, but the text normalized to an empty feature vector; the
   * prediction rests on the model bias alone.
   */
  RC_STATUS_ZERO_VECTOR = 1,
  /**
   * A required pointer argument was null.
   */
  RC_STATUS_NULL_ARGUMENT = 2,
  /**
   * A string argument was not valid UTF-8.
   */
  RC_STATUS_INVALID_UTF8 = 3,
  /**
   * The model or vocabulary file could not be loaded or failed
   * verification.
   */
  RC_STATUS_LOAD_FAILED = 4,
  /**
   * Classification failed; see `rc_last_error`.
   */
  RC_STATUS_CLASSIFY_FAILED = 5,
  /**
   * An internal invariant was violated.
   */
  RC_STATUS_INTERNAL = 6,
} RcStatus;

/**
 * Opaque classifier handle.
 */
typedef struct RcClassifier RcClassifier;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rc_version(void);

/**
 * Number of root-cause classes (the length of every probability array).
 */
uintptr_t rc_class_count(void);

/**
 * Canonical name of the class at `index` as a static string, or null when
 * the index is out of range.
 */
const char *rc_class_name(uint32_t index);

/**
 * Copies the calling thread's most recent error message (NUL-terminated,
 * truncated to `capacity`) into `buffer` and returns the full message
 * length in bytes, excluding the terminator.
 *
 * # Safety
 * `buffer` must point to at least `capacity` writable bytes, or be null
 * (in which case only the length is returned).
 */
uintptr_t rc_last_error(char *buffer, uintptr_t capacity);

/**
 * Opens a classifier from the model and vocabulary files written by
 * `rootcause train`. On success writes the handle to `out`; release it
 * with [`rc_classifier_close`]. The model must have been trained with the
 * default term lists.
 *
 * # Safety
 * `model_path` and `vocab_path` must be NUL-terminated strings and `out`
 * a valid pointer.
 */
enum RcStatus rc_classifier_open(const char *model_path,
                                 const char *vocab_path,
                                 struct RcClassifier **out);

/**
 * Releases a classifier handle. Null is a no-op.
 *
 * # Safety
 * `handle` must be a pointer returned by [`rc_classifier_open`] that has
 * not been closed already.
 */
void rc_classifier_close(struct RcClassifier *handle);

/**
 * Classifies a bug-report summary. Writes the winning class index to
 * `class_out` and, when `probabilities_out` is non-null, the full
 * probability vector of [`rc_class_count`] entries. Returns `ZeroVector`
 * instead of `Ok` when the summary normalized to nothing.
 *
 * # Safety
 * `handle` must be an open classifier, `summary` a NUL-terminated string,
 * `class_out` a valid pointer, and `probabilities_out` either null or an
 * array of at least [`rc_class_count`] doubles.
 */
enum RcStatus rc_classify(const struct RcClassifier *handle,
                          const char *summary,
                          double *probabilities_out,
                          uint32_t *class_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROOTCAUSE_H */
