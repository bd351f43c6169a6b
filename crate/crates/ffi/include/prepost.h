#ifndef PREPOST_H
#define PREPOST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PpStatus {
  PP_STATUS_OK = 0,
  PP_STATUS_NULL_ARGUMENT = 1,
  PP_STATUS_INVALID_UTF8 = 2,
  PP_STATUS_PARSE_ERROR = 3,
  PP_STATUS_INVALID_CONFIG = 4,
  PP_STATUS_CHECK_ERROR = 5,
  PP_STATUS_GAME_ERROR = 6,
  PP_STATUS_PANIC = 7,
} PpStatus;

typedef enum PpOverall {
  PP_OVERALL_EQUIVALENT = 0,
  PP_OVERALL_NOT_EQUIVALENT = 1,
  PP_OVERALL_UNDETERMINED = 2,
} PpOverall;

typedef enum PpTowerKind {
  PP_TOWER_KIND_ZAPPER = 0,
  PP_TOWER_KIND_SPLASH = 1,
  PP_TOWER_KIND_SLOWER = 2,
} PpTowerKind;

/**
 * A game session.
 */
typedef struct PpGame PpGame;

/**
 * A parsed and typechecked specification.
 */
typedef struct PpSpec PpSpec;

/**
 * The result of comparing two specifications, including the blob plan.
 */
typedef struct PpVerdict PpVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *pp_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void pp_string_free(char *s);

/**
 * Parses and typechecks DSL text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PpStatus pp_spec_parse(const char *text, struct PpSpec **out);

/**
 * The specification as a JSON AST document.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum PpStatus pp_spec_to_json(const struct PpSpec *spec, char **out);

/**
 * # Safety
 * `spec` must be null or a live handle.
 */
void pp_spec_free(struct PpSpec *spec);

/**
 * Compares `student` with `model`. `config_json` is a check configuration object
 * (camelCase keys) or null for defaults.
 *
 * # Safety
 * Handles must be live; `config_json` null or NUL-terminated; `out` writable.
 */
enum PpStatus pp_check(const struct PpSpec *model,
                       const struct PpSpec *student,
                       const char *config_json,
                       struct PpVerdict **out);

/**
 * # Safety
 * `verdict` must be a live handle; `out` writable.
 */
enum PpStatus pp_verdict_overall(const struct PpVerdict *verdict, enum PpOverall *out);

/**
 * The full check report (verdict and blob plan) as JSON.
 *
 * # Safety
 * `verdict` must be a live handle; `out` writable.
 */
enum PpStatus pp_verdict_to_json(const struct PpVerdict *verdict, char **out);

/**
 * # Safety
 * `verdict` must be null or a live handle.
 */
void pp_verdict_free(struct PpVerdict *verdict);

/**
 * Starts a game on the standard board from the verdict's blob plan. `config_json` is a
 * game configuration object or null for defaults.
 *
 * # Safety
 * `verdict` must be a live handle; `config_json` null or NUL-terminated; `out` writable.
 */
enum PpStatus pp_game_new(const struct PpVerdict *verdict,
                          const char *config_json,
                          uint64_t seed,
                          struct PpGame **out);

/**
 * # Safety
 * `game` must be a live handle.
 */
enum PpStatus pp_game_place_tower(struct PpGame *game,
                                  enum PpTowerKind kind,
                                  int32_t col,
                                  int32_t row);

/**
 * # Safety
 * `game` must be a live handle.
 */
enum PpStatus pp_game_start_wave(struct PpGame *game);

/**
 * Advances up to `ticks` ticks (0 runs to the end) and reports whether the game ended.
 *
 * # Safety
 * `game` must be a live handle; `ended` null or writable.
 */
enum PpStatus pp_game_tick(struct PpGame *game, uint32_t ticks, bool *ended);

/**
 * # Safety
 * `game` must be a live handle; `out` writable.
 */
enum PpStatus pp_game_snapshot_json(const struct PpGame *game, char **out);

/**
 * # Safety
 * `game` must be a live handle; `out` writable.
 */
enum PpStatus pp_game_score_json(const struct PpGame *game, char **out);

/**
 * The session's action log in JSON-lines form, replayable with `prepost replay`.
 *
 * # Safety
 * `game` must be a live handle; `out` writable.
 */
enum PpStatus pp_game_log(const struct PpGame *game, char **out);

/**
 * # Safety
 * `game` must be null or a live handle.
 */
void pp_game_free(struct PpGame *game);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PREPOST_H */
