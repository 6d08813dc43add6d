/*
 * C interface to the spdelab core.
 *
 * Every call returns an spdelab_status. On failure the message is available
 * from spdelab_last_error() until the next failing call on the same thread.
 * Handles are opaque; each *_create / *_run result is released with the
 * matching *_destroy. Handles may be read from several threads at once.
 */
#ifndef SPDELAB_H
#define SPDELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPDELAB_BUILDING_LIBRARY)
#define SPDELAB_API __attribute__((visibility("default")))
#else
#define SPDELAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spdelab_status {
  SPDELAB_OK = 0,
  SPDELAB_ERR_INVALID_ARGUMENT = 1,
  SPDELAB_ERR_QUADRATURE = 2,
  SPDELAB_ERR_SINGULAR = 3,
  SPDELAB_ERR_EMBEDDING = 4,
  SPDELAB_ERR_DIVERGENCE = 5,
  SPDELAB_ERR_IO = 6,
  SPDELAB_ERR_INTERNAL = 7
} spdelab_status;

typedef enum spdelab_study_kind {
  SPDELAB_STUDY_TIME = 0,
  SPDELAB_STUDY_SPACE = 1,
  SPDELAB_STUDY_EVOLVE = 2
} spdelab_study_kind;

typedef enum spdelab_drift {
  SPDELAB_DRIFT_ALLEN_CAHN = 0, /* f(u) = u - u^3 */
  SPDELAB_DRIFT_ZERO = 1,
  SPDELAB_DRIFT_AFFINE = 2      /* f(u) = drift_a + drift_b u */
} spdelab_drift;

typedef enum spdelab_coupling {
  SPDELAB_G_ZERO = 0,
  SPDELAB_G_HALF_LINEAR = 1,        /* G(u) = u/2 */
  SPDELAB_G_HALF_ONE_MINUS_SQ = 2   /* G(u) = (1 - u^2)/2 */
} spdelab_coupling;

typedef enum spdelab_padding_mode {
  SPDELAB_PADDING_ZERO = 0,
  SPDELAB_PADDING_COVARIANCE = 1, /* covariance at the extra lags */
  SPDELAB_PADDING_TAPERED = 2     /* covariance times a smooth window to zero */
} spdelab_padding_mode;

/* Flat description of a run. spdelab_params_init fills the desk-scale
 * temporal-study defaults; level arrays are borrowed, not copied. */
typedef struct spdelab_params {
  int kind;               /* spdelab_study_kind */
  size_t samples;
  uint64_t master_seed;
  size_t workers;

  double q;
  double quad_tol;
  int padding_mode;       /* spdelab_padding_mode */
  int auto_padding;
  size_t padding;
  double padding_target;
  double rho_limit;

  double gamma;
  double eps_q;
  size_t modes;           /* 0 = ceil(h^(-2/gamma)) capped at 1e4 */
  int orthonormal_basis;

  int drift;              /* spdelab_drift */
  double drift_a;
  double drift_b;
  int coupling;           /* spdelab_coupling */
  double eps_a;
  double T;
  int random_field;
  int u0_frequency;

  size_t ref_cells;
  double dt_ref;
  const double* time_levels;
  size_t n_time_levels;
  const size_t* space_levels;
  size_t n_space_levels;
} spdelab_params;

typedef struct spdelab_table_meta {
  size_t samples;
  uint64_t master_seed;
  size_t modes;
  size_t padding;
  double rho_minus_max;
  double a_min_observed;
  double a_max_observed;
  double wall_seconds;
} spdelab_table_meta;

typedef struct spdelab_variant {
  const char* label;
  int deterministic;
  int has_q;
  double q;
  int has_gamma;
  double gamma;
  int has_coupling;
  int coupling;
  int has_eps_a;
  double eps_a;
} spdelab_variant;

typedef struct spdelab_embedding spdelab_embedding;
typedef struct spdelab_field spdelab_field;
typedef struct spdelab_study spdelab_study;
typedef struct spdelab_error_table spdelab_error_table;
typedef struct spdelab_evolution spdelab_evolution;

SPDELAB_API const char* spdelab_last_error(void);
SPDELAB_API const char* spdelab_status_name(spdelab_status status);
SPDELAB_API const char* spdelab_version(void);

/* Covariance */
SPDELAB_API spdelab_status spdelab_covariance_eval(double q, double quad_tol, double x,
                                                   double* out);
SPDELAB_API spdelab_status spdelab_covariance_column(double q, double quad_tol, size_t P,
                                                     double* values);
SPDELAB_API spdelab_status spdelab_covariance_closed_form(double q, double x, double* out);

/* Circulant embedding */
SPDELAB_API spdelab_status spdelab_padding_diagnostic(double q, double quad_tol, size_t P,
                                                      int padding_mode, const size_t* M_list,
                                                      size_t count, double* rho_minus);
/* Smallest M on the ladder 0, P/4, ..., 32P with rho_minus <= target, else
 * the best rung. */
SPDELAB_API spdelab_status spdelab_padding_select(double q, double quad_tol, size_t P,
                                                  int padding_mode, double target, size_t* M,
                                                  double* rho_minus);
SPDELAB_API spdelab_status spdelab_embedding_create(const double* column, size_t P, size_t M,
                                                    spdelab_embedding** out);
SPDELAB_API spdelab_status spdelab_embedding_create_covariance(double q, double quad_tol,
                                                               size_t P, size_t M,
                                                               int padding_mode,
                                                               spdelab_embedding** out);
SPDELAB_API void spdelab_embedding_destroy(spdelab_embedding* plan);
SPDELAB_API spdelab_status spdelab_embedding_info(const spdelab_embedding* plan, size_t* P,
                                                  size_t* M, size_t* ext_len,
                                                  double* rho_minus);
/* Writes two independent P-point samples; seed fully determines them. */
SPDELAB_API spdelab_status spdelab_embedding_sample_pair(const spdelab_embedding* plan,
                                                         uint64_t seed, double* first,
                                                         double* second);

/* Coefficient field of one sample on the reference mesh (ref_cells+1 nodes). */
SPDELAB_API spdelab_status spdelab_field_sample(const spdelab_params* params,
                                                size_t sample_index, spdelab_field** out);
SPDELAB_API void spdelab_field_destroy(spdelab_field* field);
SPDELAB_API size_t spdelab_field_size(const spdelab_field* field);
SPDELAB_API spdelab_status spdelab_field_values(const spdelab_field* field, double* z,
                                                double* a);
SPDELAB_API spdelab_status spdelab_field_info(const spdelab_field* field, double* a_min,
                                              double* a_max, size_t* padding,
                                              double* rho_minus);
SPDELAB_API spdelab_status spdelab_field_write_csv(const spdelab_field* field,
                                                   const char* path);

/* Convergence studies */
SPDELAB_API void spdelab_params_init(spdelab_params* params);
SPDELAB_API spdelab_status spdelab_mean_square_error(const double* errors, size_t count,
                                                     double* out);
SPDELAB_API spdelab_status spdelab_study_create(const spdelab_params* params,
                                                spdelab_study** out);
SPDELAB_API void spdelab_study_destroy(spdelab_study* study);
SPDELAB_API size_t spdelab_study_levels(const spdelab_study* study);
SPDELAB_API size_t spdelab_study_modes(const spdelab_study* study);
/* Per-level L2 errors of one sample against its reference solution. */
SPDELAB_API spdelab_status spdelab_study_sample_errors(const spdelab_study* study,
                                                       size_t sample_index, double* errors);
/* workers = 0 uses params.workers. */
SPDELAB_API spdelab_status spdelab_study_run(const spdelab_study* study, size_t workers,
                                             spdelab_error_table** out);

SPDELAB_API void spdelab_error_table_destroy(spdelab_error_table* table);
SPDELAB_API size_t spdelab_error_table_rows(const spdelab_error_table* table);
SPDELAB_API spdelab_status spdelab_error_table_row(const spdelab_error_table* table,
                                                   size_t row, double* level_param,
                                                   double* u_error, double* order,
                                                   int* has_order);
SPDELAB_API spdelab_status spdelab_error_table_meta(const spdelab_error_table* table,
                                                    spdelab_table_meta* meta);
SPDELAB_API spdelab_status spdelab_error_table_write_csv(const spdelab_error_table* table,
                                                         const char* path);

/* Single-sample evolutions (one trajectory per variant) */
SPDELAB_API spdelab_status spdelab_evolve_run(const spdelab_params* params,
                                              const spdelab_variant* variants,
                                              size_t count, size_t snapshot_count,
                                              size_t sample_index,
                                              spdelab_evolution** out);
SPDELAB_API void spdelab_evolution_destroy(spdelab_evolution* evo);
SPDELAB_API size_t spdelab_evolution_count(const spdelab_evolution* evo);
SPDELAB_API const char* spdelab_evolution_label(const spdelab_evolution* evo, size_t variant);
SPDELAB_API spdelab_status spdelab_evolution_info(const spdelab_evolution* evo,
                                                  size_t variant, size_t* snapshots,
                                                  size_t* nodes, size_t* modes,
                                                  size_t* padding, double* rho_minus);
/* u receives all K+2 nodal values (boundaries included). */
SPDELAB_API spdelab_status spdelab_evolution_snapshot(const spdelab_evolution* evo,
                                                      size_t variant, size_t snapshot,
                                                      double* t, double* u);
SPDELAB_API spdelab_status spdelab_evolution_write_csv(const spdelab_evolution* evo,
                                                       size_t variant, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* SPDELAB_H */
