#include "qbattery/qbattery.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <variant>

#include "qbattery/ed_oracle.hpp"
#include "qbattery/error.hpp"
#include "qbattery/ising_model.hpp"
#include "qbattery/quench_engine.hpp"
#include "qbattery/regime_analysis.hpp"

struct qb_engine {
  qb::BatteryModel model;
  std::optional<qb::QuenchEngine> xy;  // set for the XY model
  qb::SpectralSeries series;           // copy for Ising, view source for both
  double max_dt = 0.0;

  const qb::SpectralSeries& spectrum() const { return xy ? xy->series() : series; }
};

struct qb_trace {
  qb::EnergyTrace trace;
};

namespace {

thread_local std::string g_last_error;

qb_status fail(qb_status code, const char* what) {
  g_last_error = what;
  return code;
}

// Runs fn, mapping exceptions onto status codes and the thread-local message.
template <class Fn>
qb_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return QB_OK;
  } catch (const qb::Error& e) {
    switch (e.code()) {
      case qb::ErrorCode::InvalidArgument:
        return fail(QB_ERR_INVALID_ARGUMENT, e.what());
      case qb::ErrorCode::AnalysisFailure:
        return fail(QB_ERR_ANALYSIS, e.what());
      case qb::ErrorCode::EigenFailure:
        return fail(QB_ERR_NUMERICAL, e.what());
    }
    return fail(QB_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QB_ERR_INTERNAL, "unknown error");
  }
}

template <class T>
void need(const T* p, const char* name) {
  if (p == nullptr) qb::throw_invalid(std::string(name) + " must not be NULL");
}

qb::Evaluator to_evaluator(qb_evaluator e) {
  switch (e) {
    case QB_EVAL_FULL:
      return qb::Evaluator::Full;
    case QB_EVAL_SIMPLIFIED:
      return qb::Evaluator::Simplified;
  }
  qb::throw_invalid("unknown evaluator");
}

qb::RegimeOptions to_options(const qb_regime_options* o) {
  qb::RegimeOptions r;
  if (o == nullptr) return r;
  r.dt = o->dt;
  if (o->has_window) r.window = qb::TimeWindow{o->window.t_min, o->window.t_max};
  if (o->has_window_scale) r.window_scale = qb::WindowScale{o->window_scale_lo, o->window_scale_hi};
  r.evaluator = to_evaluator(o->evaluator);
  r.workers = o->workers;
  return r;
}

qb_regime_report to_report(const qb::RegimeReport& r) {
  return {r.tau_s, r.e_s, r.e_inf, r.tau_r, r.e_r, {r.window_r.t_min, r.window_r.t_max}, r.edge_warning ? 1 : 0};
}

void copy_rows(const std::vector<qb::SweepRow>& in, qb_sweep_row* out) {
  for (std::size_t i = 0; i < in.size(); ++i)
    out[i] = {in[i].param, in[i].e_s_per, in[i].e_r_per, in[i].e_inf_per,
              in[i].tau_s, in[i].tau_r, in[i].edge_warning ? 1 : 0};
}

std::vector<double> exact_trace(const qb::BatteryModel& model, std::span<const double> times) {
  using namespace qb::ed;
  if (const auto* p = std::get_if<qb::QuenchProtocol>(&model)) {
    const int spins = 2 * p->n_dimers;
    return oracle_energy_trace(build_hamiltonian(DimerizedXY{p->gamma, p->delta0}, spins),
                               build_hamiltonian(DimerizedXY{p->gamma, p->delta0 + p->delta1}, spins), times)
        .values;
  }
  const auto& i = std::get<qb::IsingParams>(model);
  return oracle_energy_trace(build_hamiltonian(TransverseIsing{i.h_initial()}, i.n_sites),
                             build_hamiltonian(TransverseIsing{i.h_final()}, i.n_sites), times)
      .values;
}

}  // namespace

extern "C" {

const char* qb_last_error(void) { return g_last_error.c_str(); }

const char* qb_version(void) { return "1.0.0"; }

void qb_regime_options_init(qb_regime_options* options) {
  if (options == nullptr) return;
  *options = qb_regime_options{};
  options->dt = 0.02;
  options->evaluator = QB_EVAL_FULL;
  options->workers = 1;
}

qb_status qb_engine_create_xy(double gamma, double delta0, double delta1, int n_dimers, qb_evaluator evaluator,
                              unsigned workers, qb_engine** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    const qb::QuenchProtocol p{gamma, delta0, delta1, n_dimers};
    auto e = std::make_unique<qb_engine>();
    e->model = p;
    e->xy.emplace(p, to_evaluator(evaluator), workers);
    e->max_dt = e->xy->max_dt();
    *out = e.release();
  });
}

qb_status qb_engine_create_ising(double h0, double h1, int n_sites, qb_engine** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    const qb::IsingParams p{h0, h1, n_sites};
    auto e = std::make_unique<qb_engine>();
    e->model = p;
    e->series = qb::ising_series(p);
    e->max_dt = qb::ising_max_dt(p);
    *out = e.release();
  });
}

void qb_engine_destroy(qb_engine* engine) { delete engine; }

qb_status qb_engine_model(const qb_engine* engine, qb_model* out) {
  return guarded([&] {
    need(engine, "engine");
    need(out, "out");
    *out = engine->xy ? QB_MODEL_XY : QB_MODEL_ISING;
  });
}

qb_status qb_engine_size(const qb_engine* engine, int* out) {
  return guarded([&] {
    need(engine, "engine");
    need(out, "out");
    *out = qb::model_size(engine->model);
  });
}

qb_status qb_engine_energy(const qb_engine* engine, double t, double* out) {
  return guarded([&] {
    need(engine, "engine");
    need(out, "out");
    if (!(t >= 0.0) || !std::isfinite(t)) qb::throw_invalid("time must be >= 0");
    *out = engine->spectrum().evaluate(t);
  });
}

qb_status qb_engine_asymptotic_energy(const qb_engine* engine, double* out) {
  return guarded([&] {
    need(engine, "engine");
    need(out, "out");
    *out = engine->spectrum().constant_part(qb::kEqualFrequencyTolerance);
  });
}

qb_status qb_engine_max_dt(const qb_engine* engine, double* out) {
  return guarded([&] {
    need(engine, "engine");
    need(out, "out");
    *out = engine->max_dt;
  });
}

qb_status qb_engine_occupations(const qb_engine* engine, int twice_q, double t, double out[2]) {
  return guarded([&] {
    need(engine, "engine");
    need(out, "out");
    if (!engine->xy) qb::throw_invalid("occupations are only defined for the XY model");
    const auto n = engine->xy->occupations(qb::ModeIndex::from_twice_q(twice_q, engine->xy->protocol().n_dimers), t);
    out[0] = n[0];
    out[1] = n[1];
  });
}

qb_status qb_engine_window(const qb_engine* engine, const qb_regime_options* options, qb_window* out) {
  return guarded([&] {
    need(engine, "engine");
    need(out, "out");
    const qb::TimeWindow w = qb::resolve_window(engine->model, to_options(options));
    *out = {w.t_min, w.t_max};
  });
}

qb_status qb_engine_regimes(const qb_engine* engine, const qb_regime_options* options, qb_regime_report* out) {
  return guarded([&] {
    need(engine, "engine");
    need(out, "out");
    const qb::RegimeOptions o = to_options(options);
    const qb::TimeWindow w = qb::resolve_window(engine->model, o);
    *out = to_report(qb::analyze_series(engine->spectrum(), engine->max_dt, w, o.dt, o.workers));
  });
}

qb_status qb_engine_trace(const qb_engine* engine, double t_end, double dt, unsigned workers, qb_trace** out) {
  return guarded([&] {
    need(engine, "engine");
    need(out, "out");
    *out = nullptr;
    qb::check_time_grid(t_end, dt, engine->max_dt);
    auto t = std::make_unique<qb_trace>();
    t->trace.values = engine->spectrum().evaluate_grid(0, qb::grid_point_count(t_end, dt), dt, workers);
    t->trace.times.resize(t->trace.values.size());
    for (std::size_t i = 0; i < t->trace.times.size(); ++i) t->trace.times[i] = static_cast<double>(i) * dt;
    t->trace.dt = dt;
    t->trace.model = engine->model;
    if (engine->xy) t->trace.evaluator = engine->xy->evaluator();
    *out = t.release();
  });
}

void qb_trace_destroy(qb_trace* trace) { delete trace; }

size_t qb_trace_size(const qb_trace* trace) { return trace ? trace->trace.size() : 0; }

const double* qb_trace_times(const qb_trace* trace) { return trace ? trace->trace.times.data() : nullptr; }

const double* qb_trace_values(const qb_trace* trace) { return trace ? trace->trace.values.data() : nullptr; }

qb_status qb_trace_regimes(const qb_engine* engine, const qb_trace* trace, const qb_window* window,
                           qb_regime_report* out) {
  return guarded([&] {
    need(engine, "engine");
    need(trace, "trace");
    need(out, "out");
    const qb::TimeWindow w = window ? qb::TimeWindow{window->t_min, window->t_max} : qb::default_window(engine->model);
    const double e_inf = engine->spectrum().constant_part(qb::kEqualFrequencyTolerance);
    *out = to_report(qb::analyze_trace(trace->trace, w, e_inf));
  });
}

qb_status qb_sweep_delta0(double gamma, double delta1, int n_dimers, const double* grid, size_t count,
                          const qb_regime_options* options, qb_sweep_row* rows) {
  return guarded([&] {
    if (count == 0) qb::throw_invalid("sweep grid is empty");
    need(grid, "grid");
    need(rows, "rows");
    copy_rows(qb::sweep_delta0(gamma, delta1, n_dimers, {grid, count}, to_options(options)), rows);
  });
}

qb_status qb_sweep_h0(double h1, int n_sites, const double* grid, size_t count, const qb_regime_options* options,
                      qb_sweep_row* rows) {
  return guarded([&] {
    if (count == 0) qb::throw_invalid("sweep grid is empty");
    need(grid, "grid");
    need(rows, "rows");
    copy_rows(qb::sweep_h0(h1, n_sites, {grid, count}, to_options(options)), rows);
  });
}

qb_status qb_linear_grid(double start, double stop, double step, double* out, size_t* count) {
  return guarded([&] {
    need(count, "count");
    const std::vector<double> g = qb::linear_grid(start, stop, step);
    if (out != nullptr) {
      if (*count < g.size()) qb::throw_invalid("grid buffer too small");
      std::copy(g.begin(), g.end(), out);
    }
    *count = g.size();
  });
}

qb_status qb_scaling_study(double gamma, double delta0, double delta1, const int* n_list, size_t count,
                           const qb_regime_options* options, qb_scaling_row* rows, qb_linear_fit* fit) {
  return guarded([&] {
    if (count == 0) qb::throw_invalid("scaling study needs at least one size");
    need(n_list, "n_list");
    need(rows, "rows");
    const qb::ScalingTable t = qb::scaling_study(gamma, delta0, delta1, {n_list, count}, to_options(options));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const qb::ScalingRow& r = t.rows[i];
      rows[i] = {r.n_dimers, r.e_s_per, r.e_r_per, r.e_inf_per, r.tau_s, r.tau_r};
    }
    if (fit != nullptr) *fit = {t.tau_r_fit.slope, t.tau_r_fit.intercept, t.tau_r_fit.r2};
  });
}

qb_status qb_classify_phase(double gamma, double delta, int* region, const char** label) {
  return guarded([&] {
    const qb::Phase p = qb::classify_phase(gamma, delta);
    if (region != nullptr) *region = qb::phase_region(p);
    if (label != nullptr) *label = qb::phase_label(p).data();
  });
}

qb_status qb_occupation_snapshot(const qb_engine* engine, double t, double* k, double* n2) {
  return guarded([&] {
    need(engine, "engine");
    need(k, "k");
    need(n2, "n2");
    if (!engine->xy) qb::throw_invalid("occupation snapshots are only defined for the XY model");
    if (!(t >= 0.0) || !std::isfinite(t)) qb::throw_invalid("time must be >= 0");
    std::size_t i = 0;
    for (const qb::ModeExpansion& e : engine->xy->modes()) {
      k[i] = e.mode.k();
      n2[i] = e.occupation_at(1, t);
      ++i;
    }
  });
}

qb_status qb_oracle_check(const qb_engine* engine, double t_end, double dt, double tolerance,
                          double* max_deviation) {
  qb_status mismatch = QB_OK;
  const qb_status s = guarded([&] {
    need(engine, "engine");
    need(max_deviation, "max_deviation");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) qb::throw_invalid("t_end must be >= 0");
    if (!(dt > 0.0)) qb::throw_invalid("dt must be > 0");
    if (!(tolerance >= 0.0)) qb::throw_invalid("tolerance must be >= 0");
    // Pointwise comparison, so no resolution bound on dt.
    std::vector<double> times(static_cast<std::size_t>(qb::grid_point_count(t_end, dt)));
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) * dt;
    const std::vector<double> exact = exact_trace(engine->model, times);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
      worst = std::max(worst, std::abs(engine->spectrum().evaluate(times[i]) - exact[i]));
    *max_deviation = worst;
    if (!(worst <= tolerance)) {
      mismatch = QB_ERR_ORACLE_MISMATCH;
      g_last_error = "engine and exact diagonalisation disagree beyond tolerance";
    }
  });
  return s != QB_OK ? s : mismatch;
}

}  // extern "C"
