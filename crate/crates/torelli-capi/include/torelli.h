#ifndef TORELLI_H
#define TORELLI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every API call.
 */
typedef enum TorelliStatus {
  /**
   * The call succeeded.
   */
  TorelliOk = 0,
  /**
   * A required pointer argument was null.
   */
  TorelliNullPointer = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  TorelliInvalidUtf8 = 2,
  /**
   * The input was rejected; see `torelli_last_error_message`.
   */
  TorelliInvalidInput = 3,
  /**
   * A search-based routine gave up within its budget.
   */
  TorelliSearchExhausted = 4,
} TorelliStatus;

/**
 * A partitioned surface together with its homology module.
 */
typedef struct TorelliSurface TorelliSurface;

/**
 * A twist word bound to the surface it was parsed against.
 */
typedef struct TorelliWord TorelliWord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or null if
 * no call has failed yet. The pointer stays valid until the next failing
 * call on the same thread; do not free it.
 */
const char *torelli_last_error_message(void);

/**
 * Parse a surface from `{"genus", "boundaries", "partition"}` JSON and
 * build its homology module. The handle must be released with
 * `torelli_surface_free`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum TorelliStatus torelli_surface_from_json(const char *json, struct TorelliSurface **out);

/**
 * Release a surface handle. Null is ignored.
 *
 * # Safety
 * `handle` must come from `torelli_surface_from_json` and not be used
 * again afterwards.
 */
void torelli_surface_free(struct TorelliSurface *handle);

/**
 * Rank of the surface's homology module.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum TorelliStatus torelli_surface_rank(const struct TorelliSurface *handle, size_t *out);

/**
 * Parse a twist word from `{"factors": [{"class", "exp"}]}` JSON against
 * a surface. The handle must be released with `torelli_word_free`.
 *
 * # Safety
 * All pointers must be valid; `json` must be NUL-terminated.
 */
enum TorelliStatus torelli_word_from_json(const struct TorelliSurface *surface,
                                          const char *json,
                                          struct TorelliWord **out);

/**
 * Release a word handle. Null is ignored.
 *
 * # Safety
 * `handle` must come from `torelli_word_from_json` and not be used again.
 */
void torelli_word_free(struct TorelliWord *handle);

/**
 * Decide whether a word acts trivially on the surface's homology module;
 * writes 1 or 0 to `out`.
 *
 * # Safety
 * All pointers must be valid, and the word must have been parsed against
 * the same surface.
 */
enum TorelliStatus torelli_word_acts_trivially(const struct TorelliSurface *surface,
                                               const struct TorelliWord *word,
                                               int32_t *out);

/**
 * Contract a closed loop in the isotropic-line complex, writing a move
 * trace as a JSON string to `out_trace_json` (free it with
 * `torelli_string_free`). `max_bound` and `budget` of zero select the
 * defaults.
 *
 * # Safety
 * `loop_json` must be NUL-terminated and `out_trace_json` valid.
 */
enum TorelliStatus torelli_contract_loop(const char *loop_json,
                                         uint64_t max_bound,
                                         size_t budget,
                                         char **out_trace_json);

/**
 * Replay a move trace against a loop; writes 1 to `out` iff the trace
 * starts at the loop and every move replays correctly.
 *
 * # Safety
 * All pointers must be valid NUL-terminated strings / out pointers.
 */
enum TorelliStatus torelli_verify_trace(const char *loop_json,
                                        const char *trace_json,
                                        int32_t *out);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `ptr` must come from this library and not be used again afterwards.
 */
void torelli_string_free(char *ptr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORELLI_H */
