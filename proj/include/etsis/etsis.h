/*
* Copyright (C) 2026 The etsis authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
/* C interface of the etsis library. Every call returns an etsis_status;
 * on failure etsis_last_error() holds a message for the calling thread.
 * Handles are opaque and owned by the caller, who releases them with the
 * matching *_free function (NULL is accepted there). */
#ifndef ETSIS_H
#define ETSIS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(ETSIS_BUILDING_LIBRARY)
#define ETSIS_API __declspec(dllexport)
#else
#define ETSIS_API __declspec(dllimport)
#endif
#else
#define ETSIS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum etsis_status {
    ETSIS_OK                   = 0,
    ETSIS_ERR_INVALID_ARGUMENT = 1,
    ETSIS_ERR_PARSE            = 2,
    ETSIS_ERR_IO               = 3,
    ETSIS_ERR_INTEGRATION      = 4,
    ETSIS_ERR_CERTIFICATE      = 5,
    ETSIS_ERR_INFEASIBLE       = 6,
    ETSIS_ERR_INTERNAL         = 7
} etsis_status;

typedef enum etsis_mode {
    ETSIS_MODE_EVENT      = 0,
    ETSIS_MODE_CONTINUOUS = 1,
    ETSIS_MODE_NONE       = 2
} etsis_mode;

typedef enum etsis_gain_field {
    ETSIS_GAIN_K     = 0, /* per node */
    ETSIS_GAIN_L     = 1, /* per edge, in network edge order */
    ETSIS_GAIN_SIGMA = 2,
    ETSIS_GAIN_ETA   = 3,
    ETSIS_GAIN_K_BAR = 4,
    ETSIS_GAIN_L_BAR = 5,
    ETSIS_GAIN_P     = 6 /* Lyapunov weights, if known */
} etsis_gain_field;

typedef struct etsis_network etsis_network;
typedef struct etsis_objective etsis_objective;
typedef struct etsis_gains etsis_gains;
typedef struct etsis_certificate etsis_certificate;
typedef struct etsis_trajectory etsis_trajectory;

ETSIS_API const char* etsis_version(void);
ETSIS_API const char* etsis_last_error(void);
ETSIS_API const char* etsis_status_string(etsis_status s);

/* ---- network ---------------------------------------------------------- */

/* Nodes get ids "0".."n-1" and no groups. Edge e is src[e] -> dst[e].
 * Edges are stored sorted by (src, dst); per-edge arrays elsewhere in this
 * API follow that stored order (see etsis_network_edge). */
ETSIS_API etsis_status etsis_network_create(size_t n, const double* delta_bar, size_t m, const size_t* src,
                                            const size_t* dst, const double* beta_bar, etsis_network** out);
/* Directory with nodes.csv and edges.csv. */
ETSIS_API etsis_status etsis_network_load(const char* dir, etsis_network** out);
ETSIS_API etsis_status etsis_network_save(const etsis_network* net, const char* dir);
ETSIS_API size_t etsis_network_node_count(const etsis_network* net);
ETSIS_API size_t etsis_network_edge_count(const etsis_network* net);
ETSIS_API size_t etsis_network_group_count(const etsis_network* net);
/* NULL when i is out of range; valid while the handle lives. */
ETSIS_API const char* etsis_network_node_id(const etsis_network* net, size_t i);
ETSIS_API etsis_status etsis_network_edge(const etsis_network* net, size_t e, size_t* src, size_t* dst,
                                          double* beta_bar);
ETSIS_API void etsis_network_free(etsis_network* net);

typedef struct etsis_generator_options {
    size_t n;
    uint64_t seed;
    double delta_lo;
    double delta_hi;
    double beta_max;
    size_t group_count;
} etsis_generator_options;

ETSIS_API void etsis_generator_defaults(etsis_generator_options* opt);
ETSIS_API etsis_status etsis_network_generate(const etsis_generator_options* opt, etsis_network** out);

/* ---- objective -------------------------------------------------------- */

ETSIS_API etsis_status etsis_objective_load(const etsis_network* net, const char* path, etsis_objective** out);
/* One group-average threshold per network group. */
ETSIS_API etsis_status etsis_objective_from_groups(const etsis_network* net, const double* x_bar, size_t count,
                                                   etsis_objective** out);
ETSIS_API etsis_status etsis_objective_save(const etsis_network* net, const etsis_objective* obj, const char* path);
ETSIS_API size_t etsis_objective_count(const etsis_objective* obj);
ETSIS_API void etsis_objective_free(etsis_objective* obj);

/* ---- gains ------------------------------------------------------------ */

ETSIS_API etsis_status etsis_gains_create(const etsis_network* net, const double* k, const double* l,
                                          const double* sigma, const double* eta, const double* k_bar,
                                          const double* l_bar, etsis_gains** out);
ETSIS_API etsis_status etsis_gains_load(const etsis_network* net, const char* path, etsis_gains** out);
/* Includes design reports and certificate when the gains were synthesized. */
ETSIS_API etsis_status etsis_gains_save(const etsis_network* net, const etsis_gains* gains, const char* path);
/* len must equal the field's length (node or edge count). */
ETSIS_API etsis_status etsis_gains_get(const etsis_gains* gains, etsis_gain_field field, double* buf, size_t len);
ETSIS_API void etsis_gains_free(etsis_gains* gains);

/* ---- synthesis -------------------------------------------------------- */

typedef struct etsis_synthesis_options {
    double k_bar;
    double l_bar; /* capped per edge at beta_bar */
    double eps;
    double p_lo;
    double p_hi;
    double gp_tol;
    const char* debug_path; /* GP convex form and iterate log; NULL for none */
} etsis_synthesis_options;

ETSIS_API void etsis_synthesis_defaults(etsis_synthesis_options* opt);
ETSIS_API etsis_status etsis_design_p(const etsis_network* net, double p_lo, double p_hi, double* p_out, size_t n);
/* ETSIS_ERR_INFEASIBLE when a stage has no solution. cert_out may be NULL. */
ETSIS_API etsis_status etsis_synthesize(const etsis_network* net, const etsis_objective* obj,
                                        const etsis_synthesis_options* opt, etsis_gains** gains_out,
                                        etsis_certificate** cert_out);

/* ---- verification ----------------------------------------------------- */

/* p comes from the objective, else from the gains, else the default
 * corner rule with p in [0.5, 2]. */
ETSIS_API etsis_status etsis_verify(const etsis_network* net, const etsis_gains* gains, const etsis_objective* obj,
                                    etsis_certificate** out);
ETSIS_API double etsis_certificate_theta_star(const etsis_certificate* cert);
ETSIS_API int etsis_certificate_passed(const etsis_certificate* cert);
ETSIS_API etsis_status etsis_certificate_save(const etsis_certificate* cert, const char* path);
ETSIS_API void etsis_certificate_free(etsis_certificate* cert);

/* ---- simulation ------------------------------------------------------- */

typedef struct etsis_sim_options {
    double horizon;
    double step;
    double sample_interval; /* 0 stores every step */
    int record_inputs;
} etsis_sim_options;

ETSIS_API void etsis_sim_defaults(etsis_sim_options* opt);
/* x0 of draw `index` from a master seed, U[0,1) per node. */
ETSIS_API etsis_status etsis_initial_state(uint64_t seed, size_t index, double* x, size_t n);
/* gains may be NULL in ETSIS_MODE_NONE. */
ETSIS_API etsis_status etsis_simulate(const etsis_network* net, const etsis_gains* gains, etsis_mode mode,
                                      const double* x0, size_t n, const etsis_sim_options* opt,
                                      etsis_trajectory** out);
ETSIS_API size_t etsis_trajectory_sample_count(const etsis_trajectory* traj);
ETSIS_API etsis_status etsis_trajectory_sample(const etsis_trajectory* traj, size_t k, double* t, double* x,
                                               size_t n);
ETSIS_API size_t etsis_trajectory_trigger_count(const etsis_trajectory* traj);
/* trajectory.csv, inputs.csv, events.csv, summary.json; SVG plots when
 * plots != 0 and obj is given. obj may be NULL. */
ETSIS_API etsis_status etsis_trajectory_write(const etsis_trajectory* traj, const etsis_network* net,
                                              const etsis_objective* obj, const char* dir, int plots);
ETSIS_API void etsis_trajectory_free(etsis_trajectory* traj);

/* ---- scenario --------------------------------------------------------- */

/* Runs a scenario file and writes comparison.json. output_dir overrides the
 * scenario's output when not NULL. controlled_met receives 1 if both
 * controlled modes met every threshold in every draw. */
ETSIS_API etsis_status etsis_compare(const char* scenario_path, const char* output_dir, int* controlled_met);

#ifdef __cplusplus
}
#endif

#endif /* ETSIS_H */
