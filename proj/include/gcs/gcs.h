/* C interface to the graph-of-convex-sets shortest path solver. */
#ifndef GCS_GCS_H_
#define GCS_GCS_H_

#include <stddef.h>

#if defined(_WIN32)
#define GCS_API __declspec(dllexport)
#else
#define GCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gcs_error {
  GCS_OK = 0,
  GCS_E_INVALID_ARGUMENT = 1, /* null handle, bad option or rejected model */
  GCS_E_PARSE = 2,            /* malformed JSON or generator spec */
  GCS_E_IO = 3,               /* file cannot be read or written */
  GCS_E_INTERNAL = 4
} gcs_error;

/* Outcome of a solve; see gcs_result_status. */
typedef enum gcs_status {
  GCS_STATUS_OPTIMAL = 0,
  GCS_STATUS_INFEASIBLE = 1,
  GCS_STATUS_NODE_LIMIT = 2,
  GCS_STATUS_TIME_LIMIT = 3,
  GCS_STATUS_NUMERICAL_FAILURE = 4
} gcs_status;

typedef enum gcs_mode { GCS_MODE_RELAX = 0, GCS_MODE_MICP = 1 } gcs_mode;

typedef struct gcs_graph gcs_graph;
typedef struct gcs_control gcs_control;
typedef struct gcs_result gcs_result;

typedef struct gcs_options {
  gcs_mode mode;
  double tol_feas;
  double tol_gap;     /* relative optimality gap for branch and bound */
  long node_limit;
  double time_limit;  /* seconds */
  int jobs;
  int tighten;        /* degree and two-cycle rows on cyclic graphs */
  int pseudo_cost;    /* pseudo-cost instead of most-fractional branching */
  int certificate;    /* extract and check dual potentials */
} gcs_options;

/* Receives one line per branch-and-bound node. */
typedef void (*gcs_log_fn)(const char* line, void* user);

/* Message of the last failed call on this thread; never null. */
GCS_API const char* gcs_last_error(void);
GCS_API const char* gcs_version(void);

/* Strings returned through char** are owned by the caller. */
GCS_API void gcs_string_free(char* s);

GCS_API void gcs_options_default(gcs_options* opts);

/* Graphs */
GCS_API gcs_error gcs_graph_load(const char* path, gcs_graph** out);
GCS_API gcs_error gcs_graph_from_json(const char* json, gcs_graph** out);
/* hpp:<m> | random:<seed>:<n>:<nV>:<nE>:<volume>[:sq] | symmetry | 2d:<sigma>[:euclid] */
GCS_API gcs_error gcs_graph_generate(const char* spec, gcs_graph** out);
GCS_API void gcs_graph_free(gcs_graph* g);
GCS_API gcs_error gcs_graph_to_json(const gcs_graph* g, char** out);
GCS_API int gcs_graph_num_vertices(const gcs_graph* g);
GCS_API int gcs_graph_num_edges(const gcs_graph* g);
/* Largest vertex dimension. */
GCS_API int gcs_graph_dim(const gcs_graph* g);
GCS_API int gcs_graph_is_acyclic(const gcs_graph* g);
/* Approximate geometry whose optimum is not a reference value. */
GCS_API int gcs_graph_recreated(const gcs_graph* g);
/* Identifier of vertex v; valid while the graph lives. */
GCS_API const char* gcs_graph_vertex_id(const gcs_graph* g, int v);

GCS_API gcs_error gcs_solve(const gcs_graph* g, const gcs_options* opts, gcs_log_fn log,
                            void* user, gcs_result** out);

/* Control problems: a system JSON file, or a built-in "footstep[:T]" or
 * "footstep-small:T". */
GCS_API gcs_error gcs_control_load(const char* path, gcs_control** out);
GCS_API gcs_error gcs_control_from_json(const char* json, gcs_control** out);
GCS_API gcs_error gcs_control_builtin(const char* name, gcs_control** out);
GCS_API void gcs_control_free(gcs_control* c);
GCS_API gcs_error gcs_control_to_json(const gcs_control* c, char** out);
/* The graph the problem is encoded as; owned by the caller. */
GCS_API gcs_error gcs_control_graph(const gcs_control* c, gcs_graph** out);
GCS_API gcs_error gcs_control_solve(const gcs_control* c, const gcs_options* opts,
                                    gcs_log_fn log, void* user, gcs_result** out);

/* Results */
GCS_API void gcs_result_free(gcs_result* r);
GCS_API gcs_status gcs_result_status(const gcs_result* r);
GCS_API double gcs_result_cost(const gcs_result* r);
/* Proven lower bound on the optimum. */
GCS_API double gcs_result_bound(const gcs_result* r);
GCS_API double gcs_result_relaxation(const gcs_result* r);
/* (micp - relaxation) / micp; NaN unless both were solved. */
GCS_API double gcs_result_gap(const gcs_result* r);
GCS_API long gcs_result_nodes(const gcs_result* r);
GCS_API double gcs_result_seconds(const gcs_result* r);
/* Number of path vertices, 0 without a path. */
GCS_API int gcs_result_path_length(const gcs_result* r);
GCS_API int gcs_result_path_vertex(const gcs_result* r, int k);
/* Copies up to cap coordinates of the k-th path position; returns the
 * dimension, or -1 when k is out of range. */
GCS_API int gcs_result_position(const gcs_result* r, int k, double* out, int cap);
/* Optimal horizon of a control result, -1 otherwise. */
GCS_API int gcs_result_horizon(const gcs_result* r);

/* cost, bound, relaxation, gap, path, positions, certificate, timings, and
 * for control results the trajectory. */
GCS_API gcs_error gcs_result_to_json(const gcs_result* r, char** out);
GCS_API gcs_error gcs_result_trajectory_csv(const gcs_result* r, char** out);
/* Sets, edges and path projected on coordinates (px, py). */
GCS_API gcs_error gcs_result_svg(const gcs_result* r, int px, int py, char** out);
/* The same drawing without a path. */
GCS_API gcs_error gcs_graph_svg(const gcs_graph* g, int px, int py, char** out);

#ifdef __cplusplus
}
#endif

#endif
