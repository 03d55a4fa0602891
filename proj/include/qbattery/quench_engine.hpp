#pragma once

#include <array>
#include <vector>

#include "qbattery/protocol.hpp"
#include "qbattery/spectral_series.hpp"
#include "qbattery/xy_model.hpp"

namespace qb {

struct MatchingMatrix {
  ModeIndex mode;
  Matrix4c m;  // M_q = V_q^{-1} U_q
  BandPair omega_initial;
  BandPair omega_charging;
};

/// Frequency slots of the per-mode cosine series. Every term of the quartic
/// M-sum oscillates at one of these.
enum Slot : int {
  kConstant = 0,    // w'_s - w'_s, s = s2
  kDifference = 1,  // w'_1 - w'_2
  kDouble1 = 2,     // 2 w'_1
  kDouble2 = 3,     // 2 w'_2
  kSum = 4,         // w'_1 + w'_2
  kSlotCount = 5,
};

/// Cosine-series form of n_{1,q}(t) and n_{2,q}(t) for one mode.
struct ModeExpansion {
  ModeIndex mode;
  BandPair omega;           // battery bands
  BandPair omega_charging;  // charger bands
  std::array<double, kSlotCount> frequency{};
  // occupation[band][slot]; band 0 is a_q (omega1), band 1 is b_q (omega2).
  std::array<std::array<double, kSlotCount>, 2> occupation{};

  double occupation_at(int band, double t) const;
  double energy_at(double t) const;
  /// Zero-frequency part of the energy (frequencies within `tolerance` of 0).
  double constant_energy(double tolerance) const;
};

/// Equal-frequency tolerance used when splitting constant from oscillating terms.
inline constexpr double kEqualFrequencyTolerance = 1e-10;

MatchingMatrix matching_matrix(const QuenchProtocol& protocol, const ModeIndex& mode);

/// Builds the expansion from two explicit eigensystems. Exposed so callers can
/// check gauge invariance with arbitrary eigenvector phases.
ModeExpansion expand_mode(const ModeSpectrum& battery, const ModeSpectrum& charger,
                          Evaluator evaluator = Evaluator::Full);

/// Precomputed per-mode data for one protocol; cheap to evaluate at many t.
class QuenchEngine {
 public:
  explicit QuenchEngine(const QuenchProtocol& protocol, Evaluator evaluator = Evaluator::Full,
                        unsigned workers = 1);

  const QuenchProtocol& protocol() const noexcept { return protocol_; }
  Evaluator evaluator() const noexcept { return evaluator_; }
  const std::vector<ModeExpansion>& modes() const noexcept { return modes_; }
  const SpectralSeries& series() const noexcept { return series_; }

  double energy(double t) const;
  std::array<double, 2> occupations(const ModeIndex& mode, double t) const;
  double asymptotic_energy() const;

  /// Largest admissible trace step: pi / (10 max_q (w'_1 + w'_2)).
  double max_dt() const noexcept { return max_dt_; }

  EnergyTrace trace(double t_end, double dt, unsigned workers = 1) const;

 private:
  QuenchProtocol protocol_;
  Evaluator evaluator_;
  std::vector<ModeExpansion> modes_;
  SpectralSeries series_;
  double max_dt_ = 0.0;
};

// Convenience wrappers; each builds a QuenchEngine.
std::array<double, 2> occupations(const QuenchProtocol& protocol, const ModeIndex& mode, double t);
double energy_stored(const QuenchProtocol& protocol, double t, Evaluator evaluator = Evaluator::Full);
EnergyTrace energy_trace(const QuenchProtocol& protocol, double t_end, double dt,
                         Evaluator evaluator = Evaluator::Full, unsigned workers = 1);
double asymptotic_energy(const QuenchProtocol& protocol);

/// Rejects dt above the resolution bound, with the bound in the message.
void check_time_grid(double t_end, double dt, double max_dt);

}  // namespace qb
