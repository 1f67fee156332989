/* C interface to the two-phase traffic solver.
 *
 * Every handle is opaque and owned by the caller once created; release it
 * with the matching *_free function. Functions return a tp_status; on failure
 * tp_last_error() describes the problem (thread-local, valid until the next
 * call on the same thread). String outputs use caller buffers: *needed is
 * always set to the full size including the terminator, and
 * TP_ERR_BUFFER_TOO_SMALL is returned when cap is insufficient.
 */
#ifndef TWOPHASE_H
#define TWOPHASE_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(TWOPHASE_BUILDING)
#    define TP_API __declspec(dllexport)
#  else
#    define TP_API __declspec(dllimport)
#  endif
#else
#  define TP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tp_status {
  TP_OK = 0,
  TP_ERR_INVALID_ARGUMENT = 1,
  TP_ERR_NUMERICAL = 2,
  TP_ERR_IO = 3,
  TP_ERR_PARSE = 4,
  TP_ERR_BUFFER_TOO_SMALL = 5,
  TP_ERR_INTERNAL = 6
} tp_status;

typedef enum tp_phase {
  TP_PHASE_FREE = 0,
  TP_PHASE_CONGESTED = 1,
  TP_PHASE_BOUNDARY = 2,
  TP_PHASE_VACUUM = 3
} tp_phase;

typedef enum tp_wave_kind {
  TP_WAVE_LINEAR = 0,
  TP_WAVE_PHASE_TRANSITION = 1,
  TP_WAVE_SHOCK1 = 2,
  TP_WAVE_RAREFACTION1 = 3,
  TP_WAVE_CONTACT2 = 4
} tp_wave_kind;

typedef enum tp_cfl_mode { TP_CFL_SAFE = 0, TP_CFL_FIXED_VMAX = 1 } tp_cfl_mode;

TP_API const char* tp_last_error(void);
TP_API const char* tp_status_name(tp_status status);
TP_API const char* tp_version(void);

/* ---- model ---------------------------------------------------------- */

typedef struct tp_model tp_model;

typedef struct tp_state {
  double rho;
  double eta;
} tp_state;

/* psi is "linear" or "quadratic". Speeds in any consistent unit. */
TP_API tp_status tp_model_create(double R, double v_max, double w_min, double w_max,
                                 const char* psi, tp_model** out);
TP_API void tp_model_free(tp_model* model);
/* Newline-separated hypothesis violations; *n_problems = 0 when valid. */
TP_API tp_status tp_model_validate(const tp_model* model, char* buf, size_t cap,
                                   size_t* needed, size_t* n_problems);
TP_API tp_status tp_velocity(const tp_model* model, tp_state u, double* v);
TP_API tp_status tp_classify(const tp_model* model, tp_state u, tp_phase* phase);
TP_API tp_status tp_flux(const tp_model* model, tp_state u, tp_state* f);

/* ---- riemann -------------------------------------------------------- */

typedef struct tp_wave {
  tp_wave_kind kind;
  tp_state left;
  tp_state right;
  double speed_lo;
  double speed_hi;
} tp_wave;

#define TP_MAX_WAVES 3

typedef struct tp_fan {
  size_t n_waves;
  tp_wave waves[TP_MAX_WAVES];
} tp_fan;

TP_API const char* tp_wave_kind_name(tp_wave_kind kind);
TP_API const char* tp_phase_name(tp_phase phase);
TP_API tp_status tp_riemann_solve(const tp_model* model, tp_state left, tp_state right,
                                  tp_fan* out);
TP_API tp_status tp_riemann_sample(const tp_model* model, tp_state left, tp_state right,
                                   double xi, tp_state* out);
TP_API tp_status tp_godunov_flux(const tp_model* model, tp_state left, tp_state right,
                                 tp_state* flux);

/* ---- scenarios ------------------------------------------------------ */

typedef struct tp_scenario tp_scenario;

typedef struct tp_run_summary {
  size_t steps;
  size_t snapshots;
  double wall_seconds;
  double min_w;
  double max_w;
  double min_rho;
  double max_rho;
  double mass_initial;
  double mass_final;
  double rho_violation;
  double w_violation;
} tp_run_summary;

TP_API tp_status tp_scenario_builtin(const char* name, tp_scenario** out);
TP_API tp_status tp_scenario_load(const char* path, tp_scenario** out);
TP_API tp_status tp_scenario_parse(const char* text, tp_scenario** out);
TP_API void tp_scenario_free(tp_scenario* scenario);
TP_API tp_status tp_scenario_emit(const tp_scenario* scenario, char* buf, size_t cap,
                                  size_t* needed);
TP_API tp_status tp_scenario_equal(const tp_scenario* a, const tp_scenario* b, int* equal);

TP_API tp_status tp_scenario_set_cells(tp_scenario* scenario, size_t n_cells);
TP_API tp_status tp_scenario_set_cfl(tp_scenario* scenario, tp_cfl_mode mode, double courant);
TP_API tp_status tp_scenario_set_cfl_mode(tp_scenario* scenario, tp_cfl_mode mode);
TP_API tp_status tp_scenario_set_courant(tp_scenario* scenario, double courant);
TP_API tp_status tp_scenario_set_t_final(tp_scenario* scenario, double t_final);
TP_API tp_status tp_scenario_set_snapshot_every(tp_scenario* scenario, double every);
TP_API tp_status tp_scenario_set_workers(tp_scenario* scenario, unsigned workers);
TP_API tp_status tp_scenario_set_out_dir(tp_scenario* scenario, const char* dir);

/* Model constants of the scenario; kmh != 0 keeps km/h, else m/s. */
TP_API tp_status tp_scenario_model(const tp_scenario* scenario, int kmh, tp_model** out);
TP_API tp_status tp_scenario_validate(const tp_scenario* scenario, char* buf, size_t cap,
                                      size_t* needed, size_t* n_problems);
/* Writes fields.csv, summary.txt and plot.gp into the scenario's output dir. */
TP_API tp_status tp_scenario_run(const tp_scenario* scenario, tp_run_summary* summary);

/* ---- time stepping -------------------------------------------------- */

typedef struct tp_sim tp_sim;

TP_API tp_status tp_sim_create(const tp_scenario* scenario, tp_sim** out);
TP_API void tp_sim_free(tp_sim* sim);
TP_API tp_status tp_sim_stable_dt(const tp_sim* sim, double* dt);
TP_API tp_status tp_sim_step(tp_sim* sim, double dt);
TP_API tp_status tp_sim_time(const tp_sim* sim, double* t);
TP_API tp_status tp_sim_dx(const tp_sim* sim, double* dx);
/* Cell states in SI units; *n_cells is always set. */
TP_API tp_status tp_sim_cells(const tp_sim* sim, tp_state* buf, size_t cap, size_t* n_cells);

/* ---- competing phase-transition model ------------------------------- */

typedef struct tp_bw_params {
  double R;
  double V;
  double sigma;
  double sigma_plus;
  double q_minus;
  double q_plus;
} tp_bw_params;

typedef struct tp_bw_state {
  double rho;
  double q;
} tp_bw_state;

typedef struct tp_bw_wave {
  tp_wave_kind kind;
  tp_bw_state left;
  tp_bw_state right;
  double speed_lo;
  double speed_hi;
} tp_bw_wave;

typedef struct tp_bw_solution {
  size_t n_waves;
  tp_bw_wave waves[TP_MAX_WAVES];
  tp_bw_state middle;
  double pt_speed_to_middle;
  double lambda1_middle;
  int sonic_case;
} tp_bw_solution;

TP_API tp_bw_params tp_bw_default_params(void);
TP_API tp_status tp_bw_solve(const tp_bw_params* params, tp_bw_state left, tp_bw_state right,
                             tp_bw_solution* out);

typedef enum tp_model_kind { TP_MODEL_CMR = 0, TP_MODEL_BWGPB = 1 } tp_model_kind;

typedef struct tp_pair {
  tp_model_kind model;
  double rho_l, aux_l, rho_r, aux_r; /* aux is eta or q */
} tp_pair;

typedef struct tp_count_row {
  tp_pair pair;
  int n_waves; /* -1 when the pair could not be solved */
  int ok;      /* count within the model's bound */
  char error[256];
} tp_count_row;

TP_API size_t tp_demo_pairs(tp_pair* buf, size_t cap);
/* Fills rows[0..n); TP_OK even when individual rows carry errors. */
TP_API tp_status tp_compare(const tp_model* cmr, const tp_bw_params* bw, const tp_pair* pairs,
                            size_t n, tp_count_row* rows);

#ifdef __cplusplus
}
#endif

#endif /* TWOPHASE_H */
