#include <stdio.h>
#include <string.h>

#include "treegame.h"

#define CHECK(call)                                                   \
    do {                                                              \
        TgStatus s_ = (call);                                         \
        if (s_ != TG_STATUS_OK) {                                     \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, tg_last_error()); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    uint64_t k = 0;
    CHECK(tg_max_team_size(4096, 1, 3, &k));
    if (k != 541) return 2;

    TgLemmaConfig cfg;
    memset(&cfg, 0, sizeof cfg);
    cfg.n = 4096;
    cfg.segment = 1;
    cfg.m = 3;
    cfg.k = (uint32_t)k;
    cfg.mode = TG_MODE_REPAIRED;
    cfg.explorer = "greedy_frontier";
    cfg.cap = 50;

    TgRun *run = NULL;
    CHECK(tg_run_lemma(&cfg, &run));
    bool finished = false;
    uint32_t rounds = 0, vertices = 0, height = 0, passed = 0, failed = 0;
    CHECK(tg_run_outcome(run, &finished, &rounds, &vertices, &height));
    CHECK(tg_run_verify(run, &passed, &failed, NULL));
    if (failed != 0 || rounds < 3 || height != 3) return 3;

    TgTree *tree = NULL;
    CHECK(tg_run_tree(run, &tree));
    char *json = NULL;
    CHECK(tg_offline_bounds(tree, (uint32_t)k, false, rounds, &json));
    if (strstr(json, "\"euler_ub\"") == NULL) return 4;
    tg_string_free(json);
    tg_tree_free(tree);
    tg_run_free(run);

    cfg.n = 100;
    if (tg_run_lemma(&cfg, &run) != TG_STATUS_INFEASIBLE) return 5;
    if (strstr(tg_last_error(), "16^3") == NULL) return 6;
    printf("ok %u rounds, %u vertices\n", rounds, vertices);
    return 0;
}
