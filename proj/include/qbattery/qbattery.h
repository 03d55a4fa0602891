#ifndef QBATTERY_H
#define QBATTERY_H

#include <stddef.h>

#if defined(_WIN32)
#define QB_API __declspec(dllexport)
#else
#define QB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The nonzero values double as CLI exit codes. */
typedef enum qb_status {
  QB_OK = 0,
  QB_ERR_INVALID_ARGUMENT = 2,
  QB_ERR_ANALYSIS = 3,
  QB_ERR_ORACLE_MISMATCH = 4,
  QB_ERR_NUMERICAL = 5,
  QB_ERR_INTERNAL = 6
} qb_status;

typedef enum qb_evaluator { QB_EVAL_FULL = 0, QB_EVAL_SIMPLIFIED = 1 } qb_evaluator;

typedef enum qb_model { QB_MODEL_XY = 0, QB_MODEL_ISING = 1 } qb_model;

/* Message for the last failing call on this thread; "" after success. */
QB_API const char* qb_last_error(void);

QB_API const char* qb_version(void);

typedef struct qb_engine qb_engine;
typedef struct qb_trace qb_trace;

typedef struct qb_window {
  double t_min;
  double t_max;
} qb_window;

typedef struct qb_regime_report {
  double tau_s;
  double e_s;
  double e_inf;
  double tau_r;
  double e_r;
  qb_window window;
  int edge_warning;
} qb_regime_report;

typedef struct qb_regime_options {
  double dt;
  int has_window; /* use `window` as given */
  qb_window window;
  int has_window_scale; /* window = [lo, hi] * model size */
  double window_scale_lo;
  double window_scale_hi;
  qb_evaluator evaluator;
  unsigned workers;
} qb_regime_options;

/* dt = 0.02, model default window, full evaluator, one worker. */
QB_API void qb_regime_options_init(qb_regime_options* options);

/* Engines. A handle is immutable after creation and may be shared between
   threads. */
QB_API qb_status qb_engine_create_xy(double gamma, double delta0, double delta1, int n_dimers,
                                     qb_evaluator evaluator, unsigned workers, qb_engine** out);
QB_API qb_status qb_engine_create_ising(double h0, double h1, int n_sites, qb_engine** out);
QB_API void qb_engine_destroy(qb_engine* engine);

QB_API qb_status qb_engine_model(const qb_engine* engine, qb_model* out);
/* Dimers for XY, sites for Ising. */
QB_API qb_status qb_engine_size(const qb_engine* engine, int* out);
QB_API qb_status qb_engine_energy(const qb_engine* engine, double t, double* out);
QB_API qb_status qb_engine_asymptotic_energy(const qb_engine* engine, double* out);
QB_API qb_status qb_engine_max_dt(const qb_engine* engine, double* out);
/* Occupations (band 1, band 2) of mode q = twice_q / 2. XY only. */
QB_API qb_status qb_engine_occupations(const qb_engine* engine, int twice_q, double t, double out[2]);
QB_API qb_status qb_engine_window(const qb_engine* engine, const qb_regime_options* options, qb_window* out);
/* Regimes without storing a full trace. */
QB_API qb_status qb_engine_regimes(const qb_engine* engine, const qb_regime_options* options,
                                   qb_regime_report* out);

/* Traces on t_i = i * dt, 0 <= t_i <= t_end. */
QB_API qb_status qb_engine_trace(const qb_engine* engine, double t_end, double dt, unsigned workers,
                                 qb_trace** out);
QB_API void qb_trace_destroy(qb_trace* trace);
QB_API size_t qb_trace_size(const qb_trace* trace);
QB_API const double* qb_trace_times(const qb_trace* trace);
QB_API const double* qb_trace_values(const qb_trace* trace);
QB_API qb_status qb_trace_regimes(const qb_engine* engine, const qb_trace* trace, const qb_window* window,
                                  qb_regime_report* out);

/* Sweeps. `rows` must hold `count` entries; rows follow grid order. */
typedef struct qb_sweep_row {
  double param;
  double e_s_per;
  double e_r_per;
  double e_inf_per;
  double tau_s;
  double tau_r;
  int edge_warning;
} qb_sweep_row;

QB_API qb_status qb_sweep_delta0(double gamma, double delta1, int n_dimers, const double* grid, size_t count,
                                 const qb_regime_options* options, qb_sweep_row* rows);
QB_API qb_status qb_sweep_h0(double h1, int n_sites, const double* grid, size_t count,
                             const qb_regime_options* options, qb_sweep_row* rows);

/* Grid {start, start + step, ...} up to stop. Call with out = NULL to get the
   count, then again with a buffer of that size. */
QB_API qb_status qb_linear_grid(double start, double stop, double step, double* out, size_t* count);

typedef struct qb_scaling_row {
  int n_dimers;
  double e_s_per;
  double e_r_per;
  double e_inf_per;
  double tau_s;
  double tau_r;
} qb_scaling_row;

typedef struct qb_linear_fit {
  double slope;
  double intercept;
  double r2;
} qb_linear_fit;

QB_API qb_status qb_scaling_study(double gamma, double delta0, double delta1, const int* n_list, size_t count,
                                  const qb_regime_options* options, qb_scaling_row* rows, qb_linear_fit* fit);

/* Region 1..4, or 0 on a critical line. `label` points to static storage. */
QB_API qb_status qb_classify_phase(double gamma, double delta, int* region, const char** label);

/* k and n_2 for each q in ascending order; buffers hold n_dimers entries. */
QB_API qb_status qb_occupation_snapshot(const qb_engine* engine, double t, double* k, double* n2);

/* Largest |engine - exact diagonalisation| over t_i = i * dt <= t_end.
   Returns QB_ERR_ORACLE_MISMATCH (with *max_deviation set) above tolerance. */
QB_API qb_status qb_oracle_check(const qb_engine* engine, double t_end, double dt, double tolerance,
                                 double* max_deviation);

#ifdef __cplusplus
}
#endif

#endif
