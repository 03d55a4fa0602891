#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qbattery/protocol.hpp"
#include "qbattery/spectral_series.hpp"

namespace qb {

struct TimeWindow {
  double t_min = 0.0;
  double t_max = 0.0;
};

struct Peak {
  double time = 0.0;
  double value = 0.0;
  bool on_edge = false;  // argmax sat on the first or last sample of the window
};

/// First strict local maximum of the sampled trace, refined by a parabola
/// through the three bracketing samples. Throws AnalysisFailure if none.
Peak find_short_time_max(const EnergyTrace& trace);

/// Largest sample with t_min <= t <= t_max, refined the same way.
Peak find_recurrence(const EnergyTrace& trace, const TimeWindow& window);

struct RegimeReport {
  double tau_s = 0.0;
  double e_s = 0.0;
  double e_inf = 0.0;
  double tau_r = 0.0;
  double e_r = 0.0;
  TimeWindow window_r;
  bool edge_warning = false;
};

/// Recurrence window as fractions of the model size.
struct WindowScale {
  double lo;
  double hi;
};

inline constexpr WindowScale kXyWindowScale{2.0, 8.0 / 3.0};
inline constexpr WindowScale kIsingWindowScale{280.0 / 600.0, 350.0 / 600.0};

TimeWindow default_window(const BatteryModel& model);
TimeWindow scaled_window(const BatteryModel& model, const WindowScale& scale);

struct RegimeOptions {
  double dt = 0.02;
  std::optional<TimeWindow> window;        // absolute; wins over window_scale
  std::optional<WindowScale> window_scale;  // per unit of model size
  Evaluator evaluator = Evaluator::Full;
  unsigned workers = 1;
};

/// options.window, else options.window_scale, else default_window.
TimeWindow resolve_window(const BatteryModel& model, const RegimeOptions& options);

/// Regime report from an already sampled trace.
RegimeReport analyze_trace(const EnergyTrace& trace, const TimeWindow& window, double e_inf);

/// Samples only what is needed: short chunks from t = 0 until the first
/// maximum, then the recurrence window. Grid points are the same k*dt as a
/// full trace, so the result matches analyze_trace on that trace.
RegimeReport analyze_series(const SpectralSeries& series, double max_dt, const TimeWindow& window,
                            double dt, unsigned workers);

RegimeReport analyze_model(const BatteryModel& model, const RegimeOptions& options);

struct SweepRow {
  double param = 0.0;
  double e_s_per = 0.0;
  double e_r_per = 0.0;
  double e_inf_per = 0.0;
  double tau_s = 0.0;
  double tau_r = 0.0;
  bool edge_warning = false;
};

/// Rows come back in grid order. Rows run in parallel over options.workers;
/// each row is evaluated single-threaded.
std::vector<SweepRow> sweep_delta0(double gamma, double delta1, int n_dimers,
                                   std::span<const double> delta0_grid, const RegimeOptions& options);

std::vector<SweepRow> sweep_h0(double h1, int n_sites, std::span<const double> h0_grid,
                               const RegimeOptions& options);

/// {start, start + step, ...} up to stop inclusive (within step * 1e-9).
std::vector<double> linear_grid(double start, double stop, double step);

struct SnapshotPoint {
  double k = 0.0;
  double n2 = 0.0;
};

std::vector<SnapshotPoint> occupation_snapshot(const QuenchProtocol& protocol, double t,
                                               Evaluator evaluator = Evaluator::Full, unsigned workers = 1);

struct ScalingRow {
  int n_dimers = 0;
  double e_s_per = 0.0;
  double e_r_per = 0.0;
  double e_inf_per = 0.0;
  double tau_s = 0.0;
  double tau_r = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct ScalingTable {
  std::vector<ScalingRow> rows;
  LinearFit tau_r_fit;  // tau_r against n_dimers
};

/// Each size gets its own window from options.window_scale (or the default
/// scale). An absolute options.window is rejected here.
ScalingTable scaling_study(double gamma, double delta0, double delta1, std::span<const int> n_list,
                           const RegimeOptions& options);

}  // namespace qb
