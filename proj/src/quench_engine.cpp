#include "qbattery/quench_engine.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qbattery/error.hpp"
#include "qbattery/numeric.hpp"

namespace qb {

void QuenchProtocol::validate() const {
  if (!(delta1 >= 0.0) || !std::isfinite(delta1)) throw_invalid("delta1 must be a finite value >= 0");
  battery().validate();
  charger().validate();
}

void IsingParams::validate() const {
  if (!std::isfinite(h0) || !std::isfinite(h1)) throw_invalid("Ising fields must be finite");
  if (n_sites < 2) throw_invalid("n_sites must be >= 2");
}

int model_size(const BatteryModel& model) noexcept {
  return std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, QuenchProtocol>)
          return m.n_dimers;
        else
          return m.n_sites;
      },
      model);
}

namespace {

MatchingMatrix make_matching(const QuenchProtocol& protocol, const ModeSpectrum& battery,
                             const ModeSpectrum& charger) {
  MatchingMatrix out{battery.mode, Matrix4c::Identity(), battery.bands(), charger.bands()};
  // Null quench: both eigensystems are the same, so M is the identity exactly.
  if (protocol.delta1 != 0.0) out.m = charger.eigvecs.adjoint() * battery.eigvecs;
  return out;
}

void fill_frequencies(ModeExpansion& e) {
  const double w1 = e.omega_charging.omega1;
  const double w2 = e.omega_charging.omega2;
  e.frequency[kConstant] = 0.0;
  e.frequency[kDifference] = std::abs(w1 - w2);
  e.frequency[kDouble1] = 2.0 * w1;
  e.frequency[kDouble2] = 2.0 * w2;
  e.frequency[kSum] = w1 + w2;
}

// The quartic M-sum for n_{s1,q}(t): first family oscillates at w'_s - w'_s2,
// second family at w'_s + w'_s2. Indices are 0-based; the hole rows are s+2.
void expand_full(const Matrix4c& m, ModeExpansion& e) {
  for (int s1 = 0; s1 < 2; ++s1) {
    std::array<double, kSlotCount> acc{};
    for (int s = 0; s < 2; ++s) {
      for (int s2 = 0; s2 < 2; ++s2) {
        for (int s3 = 0; s3 < 2; ++s3) {
          const Complex same = m(s + 2, s1) * std::conj(m(s2 + 2, s1)) *
                               std::conj(m(s + 2, s3 + 2)) * m(s2 + 2, s3 + 2);
          const Complex cross = m(s + 2, s1) * std::conj(m(s2, s1)) *
                                std::conj(m(s + 2, s3 + 2)) * m(s2, s3 + 2);
          acc[s == s2 ? kConstant : kDifference] += 2.0 * same.real();
          const int slot = s != s2 ? kSum : (s == 0 ? kDouble1 : kDouble2);
          acc[slot] += 2.0 * cross.real();
        }
      }
    }
    e.occupation[s1] = acc;
  }
}

// Only the s = s1 = s2 = s3 terms.
void expand_simplified(const Matrix4c& m, ModeExpansion& e) {
  for (int b = 0; b < 2; ++b) {
    const int h = b + 2;
    e.occupation[b].fill(0.0);
    e.occupation[b][kConstant] = 2.0 * std::norm(m(h, b)) * std::norm(m(h, h));
    const Complex osc = m(h, b) * std::conj(m(b, b)) * std::conj(m(h, h)) * m(b, h);
    e.occupation[b][b == 0 ? kDouble1 : kDouble2] = 2.0 * osc.real();
  }
}

ModeExpansion expand_matching(const Matrix4c& m, const ModeSpectrum& battery,
                              const ModeSpectrum& charger, Evaluator evaluator) {
  ModeExpansion e{battery.mode, battery.bands(), charger.bands()};
  fill_frequencies(e);
  if (evaluator == Evaluator::Full)
    expand_full(m, e);
  else
    expand_simplified(m, e);
  return e;
}

}  // namespace

double ModeExpansion::occupation_at(int band, double t) const {
  CompensatedSum sum;
  for (int s = 0; s < kSlotCount; ++s)
    sum.add(occupation[band][s] * std::cos(frequency[s] * t));
  return sum.value();
}

double ModeExpansion::energy_at(double t) const {
  return omega.omega1 * occupation_at(0, t) + omega.omega2 * occupation_at(1, t);
}

double ModeExpansion::constant_energy(double tolerance) const {
  CompensatedSum sum;
  for (int s = 0; s < kSlotCount; ++s) {
    if (std::abs(frequency[s]) > tolerance) continue;
    sum.add(omega.omega1 * occupation[0][s]);
    sum.add(omega.omega2 * occupation[1][s]);
  }
  return sum.value();
}

MatchingMatrix matching_matrix(const QuenchProtocol& protocol, const ModeIndex& mode) {
  protocol.validate();
  const ModeSpectrum battery = mode_eigensystem(protocol.battery(), mode);
  const ModeSpectrum charger = mode_eigensystem(protocol.charger(), mode);
  return make_matching(protocol, battery, charger);
}

ModeExpansion expand_mode(const ModeSpectrum& battery, const ModeSpectrum& charger,
                          Evaluator evaluator) {
  return expand_matching(charger.eigvecs.adjoint() * battery.eigvecs, battery, charger, evaluator);
}

QuenchEngine::QuenchEngine(const QuenchProtocol& protocol, Evaluator evaluator, unsigned workers)
    : protocol_(protocol), evaluator_(evaluator), series_(protocol.n_dimers) {
  protocol_.validate();
  const auto mode_list = mode_set(protocol_.n_dimers);
  std::vector<ModeExpansion> expansions(mode_list.size(), ModeExpansion{mode_list.front(), {}, {}});
  parallel_for(mode_list.size(), workers, [&](std::size_t i) {
    const ModeSpectrum battery = mode_eigensystem(protocol_.battery(), mode_list[i]);
    const ModeSpectrum charger = mode_eigensystem(protocol_.charger(), mode_list[i]);
    const MatchingMatrix mm = make_matching(protocol_, battery, charger);
    expansions[i] = expand_matching(mm.m, battery, charger, evaluator_);
  });
  modes_ = std::move(expansions);

  double fastest = 0.0;
  for (const ModeExpansion& e : modes_) {
    for (int s = 0; s < kSlotCount; ++s)
      series_.add(e.frequency[s], e.omega.omega1 * e.occupation[0][s] + e.omega.omega2 * e.occupation[1][s]);
    fastest = std::max(fastest, e.omega_charging.omega1 + e.omega_charging.omega2);
  }
  max_dt_ = fastest > 0.0 ? std::numbers::pi / (10.0 * fastest) : std::numeric_limits<double>::infinity();
}

double QuenchEngine::energy(double t) const {
  if (!(t >= 0.0)) throw_invalid("time must be >= 0");
  return series_.evaluate(t);
}

std::array<double, 2> QuenchEngine::occupations(const ModeIndex& mode, double t) const {
  if (!(t >= 0.0)) throw_invalid("time must be >= 0");
  if (mode.period() != protocol_.n_dimers) throw_invalid("mode does not belong to this chain");
  const ModeExpansion& e = modes_[static_cast<std::size_t>(mode.position())];
  return {e.occupation_at(0, t), e.occupation_at(1, t)};
}

double QuenchEngine::asymptotic_energy() const {
  return series_.constant_part(kEqualFrequencyTolerance);
}

void check_time_grid(double t_end, double dt, double max_dt) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw_invalid("t_end must be > 0");
  if (!(dt > 0.0)) throw_invalid("dt must be > 0");
  if (dt > max_dt) {
    std::ostringstream os;
    os.precision(17);
    os << "dt = " << dt << " does not resolve the fastest charging frequency; need dt <= " << max_dt;
    throw_invalid(os.str());
  }
}

EnergyTrace QuenchEngine::trace(double t_end, double dt, unsigned workers) const {
  check_time_grid(t_end, dt, max_dt_);
  EnergyTrace out;
  const long n = grid_point_count(t_end, dt);
  out.values = series_.evaluate_grid(0, n, dt, workers);
  out.times.resize(out.values.size());
  for (std::size_t i = 0; i < out.times.size(); ++i) out.times[i] = static_cast<double>(i) * dt;
  out.dt = dt;
  out.model = protocol_;
  out.evaluator = evaluator_;
  return out;
}

std::array<double, 2> occupations(const QuenchProtocol& protocol, const ModeIndex& mode, double t) {
  return QuenchEngine(protocol).occupations(mode, t);
}

double energy_stored(const QuenchProtocol& protocol, double t, Evaluator evaluator) {
  return QuenchEngine(protocol, evaluator).energy(t);
}

EnergyTrace energy_trace(const QuenchProtocol& protocol, double t_end, double dt, Evaluator evaluator,
                         unsigned workers) {
  return QuenchEngine(protocol, evaluator, workers).trace(t_end, dt, workers);
}

double asymptotic_energy(const QuenchProtocol& protocol) {
  return QuenchEngine(protocol).asymptotic_energy();
}

}  // namespace qb
