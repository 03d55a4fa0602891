#pragma once

#include <variant>
#include <vector>

#include "qbattery/xy_model.hpp"

namespace qb {

/// Double quench of the dimerization: delta0 -> delta0 + delta1 during charging.
struct QuenchProtocol {
  double gamma = 1.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  int n_dimers = 2;

  void validate() const;
  ChainParams battery() const { return {gamma, delta0, n_dimers}; }
  ChainParams charger() const { return {gamma, delta0 + delta1, n_dimers}; }
};

/// Transverse-field Ising battery: field h0 -> h0 + h1 during charging.
struct IsingParams {
  double h0 = 0.0;
  double h1 = 0.0;
  int n_sites = 2;

  void validate() const;
  double h_initial() const noexcept { return h0; }
  double h_final() const noexcept { return h0 + h1; }
};

enum class Evaluator { Full, Simplified };

using BatteryModel = std::variant<QuenchProtocol, IsingParams>;

/// Number of modes used for per-unit normalisation: dimers (XY) or sites (Ising).
int model_size(const BatteryModel& model) noexcept;

/// Sampled stored energy on the uniform grid t_i = i * dt.
struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> values;
  double dt = 0.0;
  BatteryModel model;
  Evaluator evaluator = Evaluator::Full;

  std::size_t size() const noexcept { return values.size(); }
};

}  // namespace qb
