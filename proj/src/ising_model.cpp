#include "qbattery/ising_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qbattery/error.hpp"
#include "qbattery/quench_engine.hpp"

namespace qb {

namespace {

constexpr double kDispersionFloor = 1e-300;

void check_mode(int n_sites, const ModeIndex& mode) {
  if (n_sites < 2) throw_invalid("n_sites must be >= 2");
  if (mode.period() != n_sites) throw_invalid("mode does not belong to this Ising chain");
}

}  // namespace

double ising_dispersion(double h, int n_sites, const ModeIndex& mode) {
  check_mode(n_sites, mode);
  const double k = mode.k();
  // (h - cos k)^2 + sin^2 k avoids the cancellation in 1 + h^2 - 2h cos k near h = 1, k = 0.
  const double a = h - std::cos(k);
  const double b = std::sin(k);
  return std::hypot(a, b);
}

AnglePair bogoliubov_angle(double h, int n_sites, const ModeIndex& mode) {
  const double eps = ising_dispersion(h, n_sites, mode);
  if (!(eps > kDispersionFloor))
    throw Error(ErrorCode::EigenFailure, "Ising dispersion vanishes; Bogoliubov angle undefined");
  const double k = mode.k();
  return {std::sin(k) / eps, (h - std::cos(k)) / eps};
}

IsingModeData ising_mode_data(const IsingParams& params, const ModeIndex& mode) {
  params.validate();
  IsingModeData d{mode, 0.0, 0.0, {}, {}};
  d.eps = ising_dispersion(params.h_initial(), params.n_sites, mode);
  d.omega = ising_dispersion(params.h_final(), params.n_sites, mode);
  d.theta_i = bogoliubov_angle(params.h_initial(), params.n_sites, mode);
  d.theta_f = bogoliubov_angle(params.h_final(), params.n_sites, mode);
  return d;
}

namespace {

double resolution_bound(const SpectralSeries& series) {
  const double fastest = series.max_frequency();
  return fastest > 0.0 ? std::numbers::pi / (10.0 * fastest) : std::numeric_limits<double>::infinity();
}

double mode_amplitude(const IsingModeData& d, double h1) {
  const double s = std::sin(d.mode.k());
  return h1 * h1 * s * s / (2.0 * d.eps * d.omega * d.omega);
}

}  // namespace

double ising_mode_energy(const IsingModeData& data, double h1, double t) {
  return mode_amplitude(data, h1) * (1.0 - std::cos(2.0 * data.omega * t));
}

SpectralSeries ising_series(const IsingParams& params) {
  params.validate();
  SpectralSeries series(params.n_sites);
  for (const ModeIndex& mode : mode_set(params.n_sites)) {
    const IsingModeData d = ising_mode_data(params, mode);
    const double a = mode_amplitude(d, params.h1);
    series.add(0.0, a);
    series.add(2.0 * d.omega, -a);
  }
  return series;
}

double ising_energy_stored(const IsingParams& params, double t) {
  if (!(t >= 0.0)) throw_invalid("time must be >= 0");
  return ising_series(params).evaluate(t);
}

double ising_asymptotic_energy(const IsingParams& params) {
  return ising_series(params).constant_part(kEqualFrequencyTolerance);
}

double ising_max_dt(const IsingParams& params) {
  return resolution_bound(ising_series(params));
}

EnergyTrace ising_energy_trace(const IsingParams& params, double t_end, double dt, unsigned workers) {
  const SpectralSeries series = ising_series(params);
  check_time_grid(t_end, dt, resolution_bound(series));
  EnergyTrace out;
  out.values = series.evaluate_grid(0, grid_point_count(t_end, dt), dt, workers);
  out.times.resize(out.values.size());
  for (std::size_t i = 0; i < out.times.size(); ++i) out.times[i] = static_cast<double>(i) * dt;
  out.dt = dt;
  out.model = params;
  return out;
}

}  // namespace qb
