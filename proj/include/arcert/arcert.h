#ifndef ARCERT_H
#define ARCERT_H

/* C interface of the arcert library. Every handle is opaque and owned by the
 * caller once returned; release it with the matching *_free function. Functions
 * returning arcert_status leave a thread-local message for arcert_last_error()
 * when they fail. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define ARCERT_API __attribute__((visibility("default")))
#else
#define ARCERT_API
#endif

typedef enum arcert_status {
  ARCERT_OK = 0,
  ARCERT_EMPTY_INTERSECTION = 1,
  ARCERT_UNCOVERED_REGION = 2,
  ARCERT_NO_ENCLOSURE = 3,
  ARCERT_PRECONDITION_VIOLATED = 4,
  ARCERT_NO_ATTRACTOR = 5,
  ARCERT_DECOMPOSITION_INCONSISTENT = 6,
  ARCERT_ANCHOR_FAILURE = 7,
  ARCERT_EMPTY_INPUT = 8,
  ARCERT_PARSE_ERROR = 9,
  ARCERT_VALIDATION_ERROR = 10,
  ARCERT_INVALID_ARGUMENT = 11,
  ARCERT_IO_ERROR = 12,
  ARCERT_INTERNAL_ERROR = 13
} arcert_status;

/* Process exit codes reported by arcert_result_exit_code. */
enum { ARCERT_EXIT_OK = 0, ARCERT_EXIT_ERROR = 1, ARCERT_EXIT_CERTIFICATE_FAILED = 2 };

typedef struct arcert_config arcert_config;
typedef struct arcert_result arcert_result;
typedef struct arcert_graph arcert_graph;

ARCERT_API const char* arcert_version(void);
ARCERT_API const char* arcert_status_name(arcert_status status);
/* Message of the last failure on this thread ("" if none). */
ARCERT_API const char* arcert_last_error(void);

ARCERT_API void arcert_string_free(char* text);
ARCERT_API void arcert_ids_free(uint64_t* ids);

/* Configuration text (see docs/config.md). */
ARCERT_API arcert_status arcert_config_parse(const char* text, arcert_config** out);
ARCERT_API arcert_status arcert_config_load(const char* path, arcert_config** out);
ARCERT_API void arcert_config_free(arcert_config* config);
/* Canonical text; parsing it again yields an equal configuration. */
ARCERT_API arcert_status arcert_config_print(const arcert_config* config, char** out_text);
ARCERT_API size_t arcert_config_dim(const arcert_config* config);

/* Overrides; each re-validates the whole configuration and leaves it
 * unchanged on failure. */
ARCERT_API arcert_status arcert_config_set_lambda(arcert_config* config, double lambda);
ARCERT_API arcert_status arcert_config_set_tau(arcert_config* config, double tau);
/* count 1 applies the same subdivision to every axis. */
ARCERT_API arcert_status arcert_config_set_grid(arcert_config* config, const uint64_t* subdivisions, size_t count);
ARCERT_API arcert_status arcert_config_set_threads(arcert_config* config, unsigned threads);

/* Interval hull of F over the box [lo, hi] (dim entries each) at a lambda value. */
ARCERT_API arcert_status arcert_config_evaluate_hull(const arcert_config* config, const double* lo,
                                                     const double* hi, double lambda, double* out_lo,
                                                     double* out_hi);

/* command: build-map, invariant, isolate, decompose, sweep or continue.
 * out_dir may be NULL to skip writing files. */
ARCERT_API arcert_status arcert_run(const arcert_config* config, const char* command, const char* out_dir,
                                    arcert_result** out);
ARCERT_API int arcert_result_exit_code(const arcert_result* result);
ARCERT_API const char* arcert_result_json(const arcert_result* result);
ARCERT_API const char* arcert_result_summary(const arcert_result* result);
ARCERT_API const char* arcert_result_timings(const arcert_result* result);
ARCERT_API void arcert_result_free(arcert_result* result);

/* Box-map graph of the configuration at its lambda. */
ARCERT_API arcert_status arcert_graph_build(const arcert_config* config, arcert_graph** out);
ARCERT_API void arcert_graph_free(arcert_graph* graph);
ARCERT_API uint64_t arcert_graph_cell_count(const arcert_graph* graph);
ARCERT_API uint64_t arcert_graph_edge_count(const arcert_graph* graph);
/* Borrowed view of the out-neighbours of a cell, valid while the graph lives. */
ARCERT_API arcert_status arcert_graph_targets(const arcert_graph* graph, uint64_t cell, const uint64_t** targets,
                                              size_t* count);
/* 1 if some image of the cell left the domain, 0 if not, -1 on a bad cell id. */
ARCERT_API int arcert_graph_exited(const arcert_graph* graph, uint64_t cell);
ARCERT_API arcert_status arcert_graph_write_edges(const arcert_graph* graph, const char* path);
/* Inv(N) for the cell ids of N; the result is sorted, free it with arcert_ids_free. */
ARCERT_API arcert_status arcert_graph_invariant_part(const arcert_graph* graph, const uint64_t* n_ids, size_t n_count,
                                                     uint64_t** out_ids, size_t* out_count);

#ifdef __cplusplus
}
#endif

#endif
