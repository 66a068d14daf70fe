/*
 * C interface to the steering library.
 *
 * Every function returns a steer_status. On failure the message for the
 * calling thread is available from steer_last_error() until the next call
 * on that thread. Handles are opaque and owned by the caller; release them
 * with the matching *_free function (passing NULL is allowed). Strings
 * returned through char** out-parameters are heap allocated and released
 * with steer_string_free.
 */
#ifndef STEERING_C_H
#define STEERING_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(STEERING_BUILDING_LIBRARY)
#    define STEERING_API __declspec(dllexport)
#  else
#    define STEERING_API __declspec(dllimport)
#  endif
#else
#  define STEERING_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum steer_status {
  STEER_OK = 0,
  STEER_ERR_INVALID_ARGUMENT = 1, /* value outside an operation's domain */
  STEER_ERR_UNSUPPORTED = 2,      /* combination without an implementation */
  STEER_ERR_PARSE = 3,            /* malformed input file */
  STEER_ERR_DATA = 4,             /* input data cannot serve the request */
  STEER_ERR_INTERNAL = 5
} steer_status;

typedef enum steer_criterion_kind {
  STEER_SHANNON = 0,
  STEER_TSALLIS = 1,
  STEER_RENYI = 2,
  STEER_DIMENSION_BOUNDED = 3
} steer_criterion_kind;

/* Orders use HUGE_VAL / INFINITY for the infinite order. q is read for
 * STEER_TSALLIS, r and s for STEER_RENYI. */
typedef struct steer_criterion {
  steer_criterion_kind kind;
  double q;
  double r;
  double s;
} steer_criterion;

typedef enum steer_mode { STEER_MODE_MUB = 0, STEER_MODE_NOM = 1 } steer_mode;

typedef struct steer_scenario {
  double mu;
  double alpha_deg;
  double phi_deg;
  int m;
  steer_mode mode;
} steer_scenario;

typedef enum steer_mc_class { STEER_ROM = 0, STEER_CRM = 1 } steer_mc_class;

typedef enum steer_scheme {
  STEER_SCHEME_DIHEDRAL = 0,
  STEER_SCHEME_HAAR = 1,
  STEER_SCHEME_ISOTROPIC = 2,
  STEER_SCHEME_ANGLE = 3
} steer_scheme;

typedef struct steer_mc_config {
  int m;
  steer_mc_class measurement_class;
  steer_scheme scheme;
  const double* mu_grid;
  size_t mu_count;
  uint64_t samples;
  double bound_factor;
  uint64_t seed;
  unsigned threads; /* 0: hardware concurrency */
} steer_mc_config;

typedef struct steer_mc_estimate {
  int m;
  steer_scheme scheme;
  double mu;
  double bound_factor;
  uint64_t samples;
  uint64_t violations;
  double probability;
  double standard_error;
} steer_mc_estimate;

typedef struct steer_report_entry {
  steer_criterion criterion;
  int m;
  double value;
  double stat_err;
  double sys_err;
  double total_err;
  int steerable;
} steer_report_entry;

typedef struct steer_sweep steer_sweep;
typedef struct steer_mc_result steer_mc_result;
typedef struct steer_histogram steer_histogram;
typedef struct steer_counts steer_counts;
typedef struct steer_report steer_report;

STEERING_API const char* steer_version(void);
STEERING_API const char* steer_last_error(void);
STEERING_API void steer_string_free(char* s);

/* Criteria and names ("shannon", "tsallis2", "renyi", "renyiRS", "db").
 * r and s are read only for "renyiRS". */
STEERING_API steer_status steer_criterion_parse(const char* name, double r, double s, steer_criterion* out);
STEERING_API steer_status steer_criterion_label(const steer_criterion* c, char** family, char** order);
STEERING_API steer_status steer_default_scheme(steer_mc_class cls, steer_scheme* out);
STEERING_API steer_status steer_scheme_parse(const char* name, steer_scheme* out);
STEERING_API steer_status steer_class_parse(const char* name, steer_mc_class* out);

/* Classical bounds. */
STEERING_API steer_status steer_bound_db(int m, int d_a, double* out);
STEERING_API steer_status steer_bound_tsallis(double q, int m, double* out);
STEERING_API steer_status steer_bound_renyi2(double* out);

/* Steering parameters. */
STEERING_API steer_status steer_closed_form(const steer_scenario* s, const steer_criterion* c, double* out);
STEERING_API steer_status steer_pipeline(const steer_scenario* s, const steer_criterion* c, double* out);
STEERING_API steer_status steer_critical_mu(double alpha_deg, double phi_deg, double* out);
/* *found is 0 when the parameter does not change sign on [0, 90] degrees. */
STEERING_API steer_status steer_critical_alpha(const steer_criterion* c, double mu, double phi_deg, int m,
                                               double* alpha_deg, int* found);

/* Sweeps over Alice's in-plane rotation. */
STEERING_API steer_status steer_sweep_run(const steer_scenario* base, const double* alphas_deg, size_t alpha_count,
                                          const steer_criterion* criteria, size_t criteria_count, steer_sweep** out);
STEERING_API size_t steer_sweep_size(const steer_sweep* sw);
STEERING_API steer_status steer_sweep_value(const steer_sweep* sw, size_t row, double* alpha_deg, double* value);
STEERING_API steer_status steer_sweep_csv(const steer_sweep* sw, char** csv);
STEERING_API void steer_sweep_free(steer_sweep* sw);

/* Monte Carlo violation probabilities. */
STEERING_API steer_status steer_mc_run(const steer_mc_config* cfg, steer_mc_result** out);
STEERING_API steer_status steer_mc_raised_bound_table(const double* factors, size_t factor_count, double mu,
                                                      uint64_t samples, uint64_t seed, unsigned threads,
                                                      steer_mc_result** out);
STEERING_API size_t steer_mc_size(const steer_mc_result* r);
STEERING_API steer_status steer_mc_get(const steer_mc_result* r, size_t i, steer_mc_estimate* out);
STEERING_API steer_status steer_mc_csv(const steer_mc_result* r, char** csv);
STEERING_API void steer_mc_free(steer_mc_result* r);

STEERING_API steer_status steer_mc_histogram(const steer_mc_config* cfg, int bins, steer_histogram** out);
STEERING_API size_t steer_histogram_bins(const steer_histogram* h);
STEERING_API steer_status steer_histogram_bin(const steer_histogram* h, size_t i, double* left, double* right,
                                              double* density);
STEERING_API steer_status steer_histogram_csv(const steer_histogram* h, char** csv);
STEERING_API void steer_histogram_free(steer_histogram* h);

/* Coincidence counts and their analysis. */
STEERING_API steer_status steer_counts_load(const char* path, steer_counts** out);
STEERING_API steer_status steer_counts_parse(const char* text, steer_counts** out);
/* Counts for a Werner state under MUB/NOM settings (alpha, phi ignored for
 * NOM). seed_enabled = 0 gives rounded expectations. */
STEERING_API steer_status steer_counts_synthesize(const steer_scenario* s, double counts_per_pair, int cross,
                                                  int seed_enabled, uint64_t seed, steer_counts** out);
STEERING_API steer_status steer_counts_csv(const steer_counts* c, char** csv);
STEERING_API int steer_counts_settings(const steer_counts* c);
STEERING_API void steer_counts_free(steer_counts* c);

STEERING_API steer_status steer_analyze(const steer_counts* counts, const steer_criterion* criteria,
                                        size_t criteria_count, int bootstrap, double jitter_deg, uint64_t seed,
                                        steer_report** out);
STEERING_API size_t steer_report_size(const steer_report* r);
STEERING_API steer_status steer_report_get(const steer_report* r, size_t i, steer_report_entry* out);
STEERING_API steer_status steer_report_json(const steer_report* r, char** json);
STEERING_API void steer_report_free(steer_report* r);

#ifdef __cplusplus
}
#endif

#endif /* STEERING_C_H */
