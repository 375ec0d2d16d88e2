#ifndef TREEGAME_H
#define TREEGAME_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum TgStatus {
  TG_STATUS_OK = 0,
  TG_STATUS_NULL_POINTER = 1,
  TG_STATUS_INVALID_ARGUMENT = 2,
  TG_STATUS_INFEASIBLE = 3,
  TG_STATUS_GAME_ERROR = 4,
  TG_STATUS_INTEGRITY = 5,
  TG_STATUS_PARSE = 6,
  TG_STATUS_PANIC = 7,
} TgStatus;

typedef enum TgMode {
  TG_MODE_REPAIRED = 0,
  TG_MODE_STRICT = 1,
} TgMode;

/**
 * Opaque finished game.
 */
typedef struct TgRun TgRun;

/**
 * Opaque rooted tree.
 */
typedef struct TgTree TgTree;

/**
 * Settings for [`tg_run_lemma`]. Zero `cap` or `idle_rounds` picks the default.
 */
typedef struct TgLemmaConfig {
  uint64_t n;
  uint32_t segment;
  uint32_t m;
  uint32_t k;
  enum TgMode mode;
  /**
   * Explorer name, e.g. `"greedy_frontier"`.
   */
  const char *explorer;
  uint32_t cap;
  uint32_t idle_rounds;
  bool local_view;
} TgLemmaConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *tg_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void tg_string_free(char *s);

/**
 * Single-vertex tree.
 *
 * # Safety
 * `out_tree` must be writable.
 */
enum TgStatus tg_tree_new(struct TgTree **out_tree);

/**
 * Parses `{"n": .., "parent": [null, ..]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_tree` must be writable.
 */
enum TgStatus tg_tree_from_json(const char *json, struct TgTree **out_tree);

/**
 * Attaches a path of `path_len` edges ending in `leaves` leaves at vertex `at`.
 *
 * # Safety
 * `tree` must be a live handle.
 */
enum TgStatus tg_tree_attach(struct TgTree *tree, uint32_t at, uint32_t path_len, uint32_t leaves);

/**
 * # Safety
 * `tree` must be a live handle; `out_len` writable.
 */
enum TgStatus tg_tree_len(const struct TgTree *tree, uint32_t *out_len);

/**
 * # Safety
 * `tree` must be a live handle; `out_height` writable.
 */
enum TgStatus tg_tree_height(const struct TgTree *tree, uint32_t *out_height);

/**
 * # Safety
 * `tree` must be a live handle; `out_json` writable.
 */
enum TgStatus tg_tree_to_json(const struct TgTree *tree, char **out_json);

/**
 * # Safety
 * `tree` must come from this library or be null; it is invalid afterwards.
 */
void tg_tree_free(struct TgTree *tree);

/**
 * Largest `k` the lower-bound construction supports for `(n, L, m)`.
 *
 * # Safety
 * `out_k` must be writable.
 */
enum TgStatus tg_max_team_size(uint64_t n, uint32_t segment, uint32_t m, uint64_t *out_k);

/**
 * Plays one game against the lemma revealer.
 *
 * # Safety
 * `config` must point to a valid config whose `explorer` is a
 * NUL-terminated string; `out_run` must be writable.
 */
enum TgStatus tg_run_lemma(const struct TgLemmaConfig *config, struct TgRun **out_run);

/**
 * Plays one game on a fixed tree. Zero `cap` picks the default.
 *
 * # Safety
 * `tree` must be a live handle, `explorer` a NUL-terminated string and
 * `out_run` writable.
 */
enum TgStatus tg_run_fixed(const struct TgTree *tree,
                           const char *explorer,
                           uint32_t k,
                           uint32_t cap,
                           struct TgRun **out_run);

/**
 * # Safety
 * `run` must be a live handle; the outputs writable.
 */
enum TgStatus tg_run_outcome(const struct TgRun *run,
                             bool *finished,
                             uint32_t *final_round,
                             uint32_t *vertices,
                             uint32_t *height);

/**
 * # Safety
 * `run` must be a live handle; `out_json` writable.
 */
enum TgStatus tg_run_transcript_json(const struct TgRun *run, char **out_json);

/**
 * Final tree of the game as a new handle.
 *
 * # Safety
 * `run` must be a live handle; `out_tree` writable.
 */
enum TgStatus tg_run_tree(const struct TgRun *run, struct TgTree **out_tree);

/**
 * Replays a lemma game and counts passed and failed checks. `out_report`
 * may be null; otherwise it receives the report as JSON.
 *
 * # Safety
 * `run` must be a live handle; `passed` and `failed` writable.
 */
enum TgStatus tg_run_verify(const struct TgRun *run,
                            uint32_t *passed,
                            uint32_t *failed,
                            char **out_report);

/**
 * # Safety
 * `run` must come from this library or be null; it is invalid afterwards.
 */
void tg_run_free(struct TgRun *run);

/**
 * Offline bounds for `tree` with `k` agents as JSON. `online_rounds` < 0
 * means no online run to compare.
 *
 * # Safety
 * `tree` must be a live handle; `out_json` writable.
 */
enum TgStatus tg_offline_bounds(const struct TgTree *tree,
                                uint32_t k,
                                bool brute,
                                int64_t online_rounds,
                                char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TREEGAME_H */
