/* Exercises the shared library through its C interface only. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "arcert/arcert.h"

static int failures = 0;

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                \
    }                                                            \
  } while (0)

static const char* kTranslation =
    "domain [0, 1]\n"
    "grid 10\n"
    "tau 0.15\n"
    "piece all\n"
    "  dx1 = 1\n"
    "end\n"
    "set N = all\n";

static void test_parse_errors(void) {
  arcert_config* cfg = NULL;
  CHECK(arcert_config_parse("domain [0, 1]\nbogus 1\n", &cfg) == ARCERT_PARSE_ERROR);
  CHECK(cfg == NULL);
  CHECK(strstr(arcert_last_error(), "line 2") != NULL);
  CHECK(arcert_config_parse("domain [0, 1]\ngrid 4\npiece p\n  guard x1 <= 0.5\n  dx1 = 1\nend\n", &cfg) ==
        ARCERT_VALIDATION_ERROR);
  CHECK(arcert_config_load("/nonexistent/arcert.cfg", &cfg) == ARCERT_IO_ERROR);
  CHECK(strcmp(arcert_status_name(ARCERT_OK), "Ok") == 0);
  CHECK(strcmp(arcert_status_name(ARCERT_PARSE_ERROR), "ParseError") == 0);
  CHECK(strcmp(arcert_status_name((arcert_status)99), "Unknown") == 0);
}

static void test_graph(void) {
  arcert_config* cfg = NULL;
  arcert_graph* g = NULL;
  const uint64_t* t = NULL;
  size_t n = 0;
  uint64_t* inv = NULL;
  uint64_t all[10];
  size_t inv_count = 99;
  uint64_t i;

  CHECK(arcert_config_parse(kTranslation, &cfg) == ARCERT_OK);
  CHECK(arcert_config_dim(cfg) == 1);
  CHECK(arcert_graph_build(cfg, &g) == ARCERT_OK);
  CHECK(arcert_graph_cell_count(g) == 10);
  CHECK(arcert_graph_edge_count(g) == 17);
  CHECK(arcert_graph_targets(g, 0, &t, &n) == ARCERT_OK);
  CHECK(n == 2 && t[0] == 1 && t[1] == 2);
  CHECK(arcert_graph_exited(g, 9) == 1);
  CHECK(arcert_graph_exited(g, 0) == 0);
  CHECK(arcert_graph_exited(g, 10) == -1);
  CHECK(arcert_graph_targets(g, 10, &t, &n) == ARCERT_INVALID_ARGUMENT);
  for (i = 0; i < 10; ++i) all[i] = i;
  CHECK(arcert_graph_invariant_part(g, all, 10, &inv, &inv_count) == ARCERT_OK);
  CHECK(inv_count == 0);
  arcert_ids_free(inv);
  arcert_graph_free(g);
  arcert_config_free(cfg);
}

static void test_overrides_and_hull(void) {
  arcert_config* cfg = NULL;
  uint64_t sub = 0;
  double lo = 0.2, hi = 0.4, out_lo = 0, out_hi = 0;
  char* text = NULL;

  CHECK(arcert_config_parse(kTranslation, &cfg) == ARCERT_OK);
  CHECK(arcert_config_set_tau(cfg, -1.0) == ARCERT_VALIDATION_ERROR);
  CHECK(arcert_config_set_grid(cfg, &sub, 1) == ARCERT_VALIDATION_ERROR);
  sub = 20;
  CHECK(arcert_config_set_grid(cfg, &sub, 1) == ARCERT_OK);
  CHECK(arcert_config_set_threads(cfg, 2) == ARCERT_OK);
  CHECK(arcert_config_print(cfg, &text) == ARCERT_OK);
  CHECK(text != NULL && strstr(text, "grid 20") != NULL);
  CHECK(strstr(text, "tau 0.15") != NULL);
  arcert_string_free(text);
  CHECK(arcert_config_evaluate_hull(cfg, &lo, &hi, 0.0, &out_lo, &out_hi) == ARCERT_OK);
  CHECK(out_lo == 1.0 && out_hi == 1.0);
  lo = 2.0;
  hi = 3.0;
  CHECK(arcert_config_evaluate_hull(cfg, &lo, &hi, 0.0, &out_lo, &out_hi) == ARCERT_EMPTY_INTERSECTION);
  arcert_config_free(cfg);
}

static void test_run(void) {
  arcert_config* cfg = NULL;
  arcert_result* r = NULL;

  CHECK(arcert_config_parse(kTranslation, &cfg) == ARCERT_OK);
  CHECK(arcert_run(cfg, "invariant", NULL, &r) == ARCERT_OK);
  CHECK(arcert_result_exit_code(r) == ARCERT_EXIT_OK);
  CHECK(strstr(arcert_result_json(r), "\"schema\": \"arcert-report/1\"") != NULL);
  CHECK(strlen(arcert_result_summary(r)) > 0);
  CHECK(strlen(arcert_result_timings(r)) > 0);
  arcert_result_free(r);
  r = NULL;
  CHECK(arcert_run(cfg, "fly", NULL, &r) == ARCERT_INVALID_ARGUMENT);
  CHECK(r == NULL);
  CHECK(arcert_run(cfg, "decompose", NULL, &r) != ARCERT_OK);
  CHECK(strstr(arcert_last_error(), "U") != NULL);
  arcert_config_free(cfg);
}

int main(void) {
  CHECK(strlen(arcert_version()) > 0);
  test_parse_errors();
  test_graph();
  test_overrides_and_hull();
  test_run();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("C API: all checks passed\n");
  return 0;
}
