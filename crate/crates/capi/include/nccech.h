#ifndef NCCECH_H
#define NCCECH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes returned by every fallible call.
 */
typedef enum NccStatus {
  /**
   * success
   */
  NccOk = 0,
  /**
   * a pointer argument was null or not valid UTF-8
   */
  NccBadArgument = 1,
  /**
   * the workspace text failed to parse
   */
  NccParseError = 2,
  /**
   * a reference or precondition error in otherwise well-formed input
   */
  NccInputError = 3,
  /**
   * the window or length cap was too small for the computation
   */
  NccWindowError = 4,
  /**
   * the rewrite step budget was exhausted
   */
  NccBudgetError = 5,
  /**
   * an internal invariant failed
   */
  NccInternalError = 6,
} NccStatus;

/**
 * An opaque parsed workspace.
 */
typedef struct NccWorkspace NccWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the most recent error on this thread. The pointer is
 * valid until the next failing call on the same thread; do not free it.
 */
const char *ncc_last_error(void);

/**
 * Parses workspace text into a handle. On success writes the handle to
 * `out` and returns `NccOk`; the handle must be released with
 * `ncc_workspace_free`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NccStatus ncc_workspace_parse(const char *text, struct NccWorkspace **out);

/**
 * Runs a command against a parsed workspace. `keys` and `values` are
 * parallel arrays of `nargs` argument pairs (may be null when `nargs`
 * is 0). On success writes a NUL-terminated JSON report to `json_out`;
 * release it with `ncc_string_free`.
 *
 * # Safety
 * All pointers must be valid; strings must be NUL-terminated.
 */
enum NccStatus ncc_run(const struct NccWorkspace *ws,
                       const char *command,
                       const char *const *keys,
                       const char *const *values,
                       uintptr_t nargs,
                       char **json_out);

/**
 * Releases a string returned by the library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ncc_string_free(char *s);

/**
 * Releases a workspace handle.
 *
 * # Safety
 * `ws` must come from `ncc_workspace_parse` and not be freed twice.
 */
void ncc_workspace_free(struct NccWorkspace *ws);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* NCCECH_H */
