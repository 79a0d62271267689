/* Copyright 2026 The userdp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to libuserdp.
 *
 * Conventions:
 *  - Every fallible call returns a userdp_status. On failure the output
 *    arguments are untouched and userdp_last_error() describes the problem
 *    (per thread, valid until the next failing call on that thread).
 *  - Handles are opaque and owned by the caller; release each with its
 *    destroy function. Destroy functions accept NULL.
 *  - Strings returned through char** are heap allocated; free them with
 *    userdp_string_free.
 *  - Vector outputs are written to caller-provided buffers whose length is
 *    stated per function.
 */

#ifndef USERDP_USERDP_H_
#define USERDP_USERDP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(USERDP_BUILDING_LIBRARY)
#define USERDP_API __attribute__((visibility("default")))
#else
#define USERDP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum userdp_status {
  USERDP_OK = 0,
  USERDP_ERR_ARGUMENT = 1,
  USERDP_ERR_SHAPE = 2,
  USERDP_ERR_PRECONDITION = 3,
  USERDP_ERR_BUDGET_EXHAUSTED = 4,
  USERDP_ERR_UNSUPPORTED = 5,
  USERDP_ERR_PLAN_INFEASIBLE = 6,
  USERDP_ERR_CONFIG = 7,
  USERDP_ERR_IO = 8,
  USERDP_ERR_INTERNAL = 9
} userdp_status;

typedef struct userdp_rng userdp_rng;
typedef struct userdp_dataset userdp_dataset;
typedef struct userdp_session userdp_session;

/* ---- Diagnostics ------------------------------------------------------ */

USERDP_API const char* userdp_version(void);
USERDP_API const char* userdp_status_name(userdp_status status);
USERDP_API const char* userdp_last_error(void);
USERDP_API void userdp_string_free(char* s);

/* ---- Randomness ------------------------------------------------------- */

USERDP_API userdp_status userdp_rng_create(uint64_t seed, uint64_t stream,
                                           userdp_rng** out);
USERDP_API void userdp_rng_destroy(userdp_rng* rng);
/* Uniform on [0, 1). */
USERDP_API userdp_status userdp_rng_uniform(userdp_rng* rng, double* out);

/* ---- Datasets --------------------------------------------------------- */

/* items is row-major: the items of user 0, then user 1, and so on, each of
 * length dim. items_per_user[i] gives user i's item count. bound_kind is
 * "linf" or "l2". */
USERDP_API userdp_status userdp_dataset_create(
    size_t dim, const char* bound_kind, double item_bound, size_t num_users,
    const size_t* items_per_user, const double* items, userdp_dataset** out);
USERDP_API userdp_status userdp_dataset_from_json(const char* json,
                                                  userdp_dataset** out);
USERDP_API userdp_status userdp_dataset_to_json(const userdp_dataset* data,
                                                char** out);
USERDP_API size_t userdp_dataset_num_users(const userdp_dataset* data);
USERDP_API size_t userdp_dataset_dim(const userdp_dataset* data);
USERDP_API void userdp_dataset_destroy(userdp_dataset* data);

/* ---- Primitive mechanisms --------------------------------------------- */

USERDP_API userdp_status userdp_laplace(double scale, userdp_rng* rng,
                                        double* out);
USERDP_API userdp_status userdp_exponential_mechanism(const double* costs,
                                                      size_t k, double epsilon,
                                                      userdp_rng* rng,
                                                      size_t* out);
USERDP_API userdp_status userdp_strong_composition(int64_t k, double eps0,
                                                   double delta0,
                                                   double delta_slack,
                                                   double* epsilon,
                                                   double* delta);
USERDP_API userdp_status userdp_per_step_budget(double epsilon, double delta,
                                                int64_t k, double* eps0,
                                                double* delta0,
                                                double* delta_slack);

/* ---- Range and mean estimation ---------------------------------------- */

USERDP_API userdp_status userdp_private_range(const double* xs, size_t n,
                                              double epsilon, double tau,
                                              double range_bound,
                                              userdp_rng* rng, double* lo,
                                              double* hi);
USERDP_API userdp_status userdp_winsorized_mean_1d(const double* xs, size_t n,
                                                   double epsilon, double tau,
                                                   double range_bound,
                                                   userdp_rng* rng,
                                                   double* out);
/* xs holds n row-major points of length dim; out has length dim. */
USERDP_API userdp_status userdp_winsorized_mean_highd(
    const double* xs, size_t n, size_t dim, double epsilon, double delta,
    double tau, double range_bound, double gamma, userdp_rng* rng, double* out);
/* out has length userdp_dataset_dim(data). */
USERDP_API userdp_status userdp_user_level_mean(const userdp_dataset* data,
                                                double epsilon, double delta,
                                                double gamma, userdp_rng* rng,
                                                double* out);
/* In-place unnormalized Walsh-Hadamard transform; len a power of two. */
USERDP_API userdp_status userdp_fwht(double* v, size_t len);

/* ---- Adaptive query session ------------------------------------------- */

/* Maps one user's items (num_items row-major vectors of length item_dim) to
 * out_dim values written to out. Return 0 on success; any other value aborts
 * the query with an argument error. */
typedef int (*userdp_query_fn)(void* ctx, const double* items, size_t num_items,
                               size_t item_dim, double* out, size_t out_dim);

/* The session copies the dataset; data may be destroyed afterwards. */
USERDP_API userdp_status userdp_session_create(
    const userdp_dataset* data, double epsilon, double delta, int64_t k_max,
    double gamma, double range_bound, uint64_t seed, userdp_session** out);
/* out has length out_dim. Query k_max + 1 fails with
 * USERDP_ERR_BUDGET_EXHAUSTED. */
USERDP_API userdp_status userdp_session_answer(userdp_session* session,
                                               userdp_query_fn query, void* ctx,
                                               size_t out_dim, double tau,
                                               double* out);
USERDP_API int64_t userdp_session_remaining(const userdp_session* session);
USERDP_API void userdp_session_destroy(userdp_session* session);

/* ---- Experiments ------------------------------------------------------ */

USERDP_API userdp_status userdp_experiment_validate(const char* config_json);

/* Runs a config. output_dir overrides the config's when non-NULL and
 * non-empty; seed_override applies when has_seed_override is non-zero.
 * On success *acceptance_ok reports the experiment's own check and
 * *summary_json (optional, may be NULL) receives a JSON summary. */
USERDP_API userdp_status userdp_experiment_run(
    const char* config_json, size_t jobs, int has_seed_override,
    uint64_t seed_override, const char* output_dir, int* acceptance_ok,
    char** summary_json);

/* Re-fits slopes from <output_dir>/results.csv, writes slopes.json there
 * and returns its contents. metric may be NULL for the first metric seen. */
USERDP_API userdp_status userdp_experiment_report(const char* output_dir,
                                                  const char* metric,
                                                  char** slopes_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* USERDP_USERDP_H_ */
