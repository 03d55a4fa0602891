#pragma once

#include "qbattery/protocol.hpp"
#include "qbattery/spectral_series.hpp"
#include "qbattery/xy_model.hpp"

namespace qb {

/// Bogoliubov angle carried as (sin 2theta, cos 2theta); theta itself is never formed.
struct AnglePair {
  double sin2theta = 0.0;
  double cos2theta = 1.0;
};

struct IsingModeData {
  ModeIndex mode;
  double eps = 0.0;    // dispersion at h0
  double omega = 0.0;  // dispersion at h0 + h1
  AnglePair theta_i;
  AnglePair theta_f;
};

/// eps_q = sqrt(1 + h^2 - 2 h cos k), k = 2 pi q / N.
double ising_dispersion(double h, int n_sites, const ModeIndex& mode);

/// Throws EigenFailure if eps_q underflows (h = 1 with k -> 0).
AnglePair bogoliubov_angle(double h, int n_sites, const ModeIndex& mode);

IsingModeData ising_mode_data(const IsingParams& params, const ModeIndex& mode);

/// Per-mode contribution h1^2 sin^2 k / (2 eps omega^2) * [1 - cos(2 omega t)].
double ising_mode_energy(const IsingModeData& data, double h1, double t);

/// Stored energy as a cosine series: per mode a constant and a 2*omega term.
SpectralSeries ising_series(const IsingParams& params);

double ising_energy_stored(const IsingParams& params, double t);
double ising_asymptotic_energy(const IsingParams& params);

/// Largest admissible trace step: pi / (10 * 2 max_q omega_q).
double ising_max_dt(const IsingParams& params);

EnergyTrace ising_energy_trace(const IsingParams& params, double t_end, double dt, unsigned workers = 1);

}  // namespace qb
