#ifndef COMBDUAL_H
#define COMBDUAL_H

/* Generated by cbindgen from combdual-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes shared with the command-line interface.
typedef enum CombdualStatus {
  COMBDUAL_STATUS_OK = 0,
  COMBDUAL_STATUS_STAR_BRANCH = 1,
  COMBDUAL_STATUS_INVALID_INPUT = 2,
  COMBDUAL_STATUS_REJECTED = 3,
  COMBDUAL_STATUS_INTERNAL_ERROR = 4,
  COMBDUAL_STATUS_NULL_POINTER = 5,
} CombdualStatus;

// Opaque parsed instance: a presentation together with its target set.
typedef struct CombdualInstance CombdualInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread. The pointer
// stays valid until the next failing call on the same thread.
const char *combdual_last_error(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be a pointer previously returned by one of the `combdual_*`
// functions and not yet freed.
void combdual_string_free(char *s);

// Parses an instance document. On success stores a fresh handle in `out`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be a valid pointer.
enum CombdualStatus combdual_instance_parse(const char *json, struct CombdualInstance **out);

// Releases an instance handle.
//
// # Safety
// `instance` must come from `combdual_instance_parse` and not be freed twice.
void combdual_instance_free(struct CombdualInstance *instance);

// Hex digest binding certificates to this instance.
//
// # Safety
// `instance` must be a live handle; `out` must be valid.
enum CombdualStatus combdual_instance_digest(const struct CombdualInstance *instance, char **out);

// Critical vertex sets and the toughness verdict, as a JSON report.
//
// # Safety
// `instance` must be a live handle; `out` must be valid.
enum CombdualStatus combdual_analyze(const struct CombdualInstance *instance, char **out);

// Decides the dichotomy and writes the certificate document to `out`.
// Returns `Ok` for the tough branch, `StarBranch` for the star branch.
//
// # Safety
// `instance` must be a live handle; `out` must be valid.
enum CombdualStatus combdual_decide(const struct CombdualInstance *instance, char **out);

// Verifies a certificate document against the instance. Returns `Ok` on
// accept, `Rejected` on reject, `InvalidInput` for malformed documents or a
// digest mismatch. `out_report` (optional) receives the check report JSON.
//
// # Safety
// `instance` must be a live handle; `certificate_json` must be a
// NUL-terminated string; `out_report` may be null.
enum CombdualStatus combdual_verify(const struct CombdualInstance *instance,
                                    const char *certificate_json,
                                    char **out_report);

// Materializes a truncation as Graphviz DOT text.
//
// # Safety
// `instance` must be a live handle; `out` must be valid.
enum CombdualStatus combdual_materialize_dot(const struct CombdualInstance *instance,
                                             uint32_t depth,
                                             uint32_t copies,
                                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMBDUAL_H */
