#include "qbattery/regime_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbattery/error.hpp"
#include "qbattery/ising_model.hpp"
#include "qbattery/numeric.hpp"
#include "qbattery/quench_engine.hpp"

namespace qb {

namespace {

constexpr long kShortChunk = 1024;
constexpr double kGridSlack = 1e-9;
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

double noise_floor(int size) { return 1e-12 * std::max(size, 1); }

// Parabola through (i-1, i, i+1); returns the vertex.
Peak refine(std::span<const double> y, std::size_t i, double t_i, double dt) {
  const double y0 = y[i - 1];
  const double y1 = y[i];
  const double y2 = y[i + 1];
  const double curvature = y0 - 2.0 * y1 + y2;
  if (!(curvature < 0.0)) return {t_i, y1, false};
  const double offset = 0.5 * (y0 - y2) / curvature;
  return {t_i + offset * dt, y1 - (y0 - y2) * (y0 - y2) / (8.0 * curvature), false};
}

// First strict local maximum above the noise floor, or npos.
std::size_t first_local_max(std::span<const double> y, double floor, std::size_t from) {
  for (std::size_t i = std::max<std::size_t>(from, 1); i + 1 < y.size(); ++i)
    if (y[i] > y[i - 1] && y[i] > y[i + 1] && y[i] > floor) return i;
  return kNone;
}

[[noreturn]] void no_short_max(std::span<const double> y, double floor) {
  double largest = 0.0;
  for (double v : y) largest = std::max(largest, std::abs(v));
  if (largest <= floor) throw Error(ErrorCode::AnalysisFailure, "no charging occurred: stored energy is zero");
  throw Error(ErrorCode::AnalysisFailure, "no local maximum found: trace is monotone over its span");
}

struct GridRange {
  long first;
  long last;  // inclusive
};

GridRange window_points(const TimeWindow& w, double dt) {
  return {static_cast<long>(std::ceil(w.t_min / dt - kGridSlack)),
          static_cast<long>(std::floor(w.t_max / dt + kGridSlack))};
}

// Argmax over samples y[j] at t = (first + j) * dt; first sample wins ties.
Peak window_peak(std::span<const double> y, long first, double dt) {
  if (y.empty()) throw Error(ErrorCode::AnalysisFailure, "recurrence window contains no samples");
  const auto best = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double t = static_cast<double>(first + static_cast<long>(best)) * dt;
  if (best == 0 || best + 1 == y.size()) return {t, y[best], true};
  return refine(y, best, t, dt);
}

void check_window(const TimeWindow& w) {
  if (!(w.t_min >= 0.0) || !(w.t_max > w.t_min) || !std::isfinite(w.t_max))
    throw_invalid("recurrence window needs 0 <= t_min < t_max");
}

RegimeReport assemble(const Peak& s, const Peak& r, const TimeWindow& w, double e_inf) {
  if (!(s.time < w.t_min)) {
    std::ostringstream os;
    os << "first maximum at t = " << s.time << " is not before the recurrence window";
    throw Error(ErrorCode::AnalysisFailure, os.str());
  }
  return {s.time, s.value, e_inf, r.time, r.value, w, r.on_edge};
}

}  // namespace

Peak find_short_time_max(const EnergyTrace& trace) {
  const double floor = noise_floor(model_size(trace.model));
  const std::size_t i = first_local_max(trace.values, floor, 1);
  if (i == kNone) no_short_max(trace.values, floor);
  return refine(trace.values, i, trace.times[i], trace.dt);
}

Peak find_recurrence(const EnergyTrace& trace, const TimeWindow& window) {
  check_window(window);
  if (!(trace.dt > 0.0)) throw_invalid("trace has no time step");
  const GridRange g = window_points(window, trace.dt);
  const long n = static_cast<long>(trace.size());
  if (g.last >= n) throw_invalid("trace ends before the recurrence window");
  const std::span<const double> all(trace.values);
  return window_peak(all.subspan(static_cast<std::size_t>(g.first), static_cast<std::size_t>(g.last - g.first + 1)),
                     g.first, trace.dt);
}

TimeWindow scaled_window(const BatteryModel& model, const WindowScale& scale) {
  const double n = model_size(model);
  return {scale.lo * n, scale.hi * n};
}

TimeWindow default_window(const BatteryModel& model) {
  return scaled_window(model, std::holds_alternative<IsingParams>(model) ? kIsingWindowScale : kXyWindowScale);
}

TimeWindow resolve_window(const BatteryModel& model, const RegimeOptions& options) {
  TimeWindow w = options.window ? *options.window
                 : options.window_scale ? scaled_window(model, *options.window_scale)
                                        : default_window(model);
  check_window(w);
  return w;
}

RegimeReport analyze_trace(const EnergyTrace& trace, const TimeWindow& window, double e_inf) {
  const Peak s = find_short_time_max(trace);
  const Peak r = find_recurrence(trace, window);
  return assemble(s, r, window, e_inf);
}

RegimeReport analyze_series(const SpectralSeries& series, double max_dt, const TimeWindow& window,
                            double dt, unsigned workers) {
  check_window(window);
  check_time_grid(window.t_max, dt, max_dt);
  const GridRange g = window_points(window, dt);
  const double floor = noise_floor(series.size());

  std::vector<double> head;
  std::size_t found = kNone;
  while (found == kNone) {
    const long first = static_cast<long>(head.size());
    if (first > g.first) no_short_max(head, floor);
    const std::vector<double> chunk = series.evaluate_grid(first, kShortChunk, dt, workers);
    head.insert(head.end(), chunk.begin(), chunk.end());
    found = first_local_max(head, floor, first > 0 ? static_cast<std::size_t>(first - 1) : 1);
  }
  const Peak s = refine(head, found, static_cast<double>(found) * dt, dt);

  const std::vector<double> tail = series.evaluate_grid(g.first, g.last - g.first + 1, dt, workers);
  const Peak r = window_peak(tail, g.first, dt);
  return assemble(s, r, window, series.constant_part(kEqualFrequencyTolerance));
}

RegimeReport analyze_model(const BatteryModel& model, const RegimeOptions& options) {
  const TimeWindow w = resolve_window(model, options);
  if (const auto* p = std::get_if<QuenchProtocol>(&model)) {
    const QuenchEngine engine(*p, options.evaluator, options.workers);
    return analyze_series(engine.series(), engine.max_dt(), w, options.dt, options.workers);
  }
  const auto& ising = std::get<IsingParams>(model);
  return analyze_series(ising_series(ising), ising_max_dt(ising), w, options.dt, options.workers);
}

namespace {

template <class MakeModel>
std::vector<SweepRow> sweep(std::span<const double> grid, const RegimeOptions& options, MakeModel make) {
  if (grid.empty()) throw_invalid("sweep grid is empty");
  std::vector<SweepRow> rows(grid.size());
  RegimeOptions row_options = options;
  row_options.workers = 1;
  parallel_for(grid.size(), options.workers, [&](std::size_t i) {
    const BatteryModel model = make(grid[i]);
    const RegimeReport r = analyze_model(model, row_options);
    const double n = model_size(model);
    rows[i] = {grid[i], r.e_s / n, r.e_r / n, r.e_inf / n, r.tau_s, r.tau_r, r.edge_warning};
  });
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep_delta0(double gamma, double delta1, int n_dimers,
                                   std::span<const double> delta0_grid, const RegimeOptions& options) {
  return sweep(delta0_grid, options, [&](double d0) -> BatteryModel {
    return QuenchProtocol{gamma, d0, delta1, n_dimers};
  });
}

std::vector<SweepRow> sweep_h0(double h1, int n_sites, std::span<const double> h0_grid,
                               const RegimeOptions& options) {
  return sweep(h0_grid, options, [&](double h0) -> BatteryModel { return IsingParams{h0, h1, n_sites}; });
}

std::vector<double> linear_grid(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !(step > 0.0))
    throw_invalid("grid needs finite bounds and step > 0");
  if (stop < start) throw_invalid("grid stop is below start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + kGridSlack)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

std::vector<SnapshotPoint> occupation_snapshot(const QuenchProtocol& protocol, double t, Evaluator evaluator,
                                               unsigned workers) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw_invalid("time must be >= 0");
  const QuenchEngine engine(protocol, evaluator, workers);
  std::vector<SnapshotPoint> out;
  out.reserve(engine.modes().size());
  for (const ModeExpansion& e : engine.modes()) out.push_back({e.mode.k(), e.occupation_at(1, t)});
  return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw_invalid("line fit needs two or more matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw_invalid("line fit needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

ScalingTable scaling_study(double gamma, double delta0, double delta1, std::span<const int> n_list,
                           const RegimeOptions& options) {
  if (n_list.empty()) throw_invalid("scaling study needs at least one size");
  if (options.window) throw_invalid("scaling study takes a window scale, not an absolute window");
  for (int n : n_list)
    if (n < 5) throw_invalid("scaling study needs n_dimers >= 5");

  ScalingTable table;
  table.rows.resize(n_list.size());
  RegimeOptions row_options = options;
  row_options.workers = 1;
  parallel_for(n_list.size(), options.workers, [&](std::size_t i) {
    const QuenchProtocol p{gamma, delta0, delta1, n_list[i]};
    const RegimeReport r = analyze_model(p, row_options);
    const double n = n_list[i];
    table.rows[i] = {n_list[i], r.e_s / n, r.e_r / n, r.e_inf / n, r.tau_s, r.tau_r};
  });

  if (table.rows.size() >= 2) {
    std::vector<double> x;
    std::vector<double> y;
    for (const ScalingRow& row : table.rows) {
      x.push_back(row.n_dimers);
      y.push_back(row.tau_r);
    }
    table.tau_r_fit = fit_line(x, y);
  }
  return table;
}

}  // namespace qb
