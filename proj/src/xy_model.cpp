#include "qbattery/xy_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qbattery/error.hpp"

namespace qb {

namespace {

constexpr double kDegeneracyTolerance = 1e-10;

// Rebuilds an orthonormal basis of span(cols) from the projections of
// e_1..e_4 onto it, in ascending order, so the result does not depend on
// whatever basis the eigensolver picked inside a degenerate subspace.
void canonicalize_subspace(Matrix4c& vectors, int first, int count) {
  if (count < 2) return;
  const Eigen::Matrix<Complex, 4, Eigen::Dynamic> span = vectors.middleCols(first, count);
  const Matrix4c projector = span * span.adjoint();
  int filled = 0;
  for (int e = 0; e < 4 && filled < count; ++e) {
    Eigen::Matrix<Complex, 4, 1> v = projector.col(e);
    for (int j = 0; j < filled; ++j) {
      const auto u = vectors.col(first + j);
      v -= u * (u.adjoint() * v)(0, 0);
    }
    const double norm = v.norm();
    if (norm < 1e-6) continue;
    vectors.col(first + filled) = v / norm;
    ++filled;
  }
}

}  // namespace

void ChainParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw_invalid("gamma must be a finite value > 0");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw_invalid("delta must be a finite value >= 0");
  if (n_dimers < 2) throw_invalid("n_dimers must be >= 2");
  if (energy_scale != 1.0) throw_invalid("energy scale J is fixed to 1");
}

ModeIndex ModeIndex::from_twice_q(int twice_q, int period) {
  if (period < 1) throw_invalid("mode period must be positive");
  if (twice_q % 2 == 0 || twice_q < 1 || twice_q > 2 * period - 1) {
    std::ostringstream os;
    os << "q = " << 0.5 * twice_q << " is not a half-integer in (0, " << period << ")";
    throw_invalid(os.str());
  }
  return ModeIndex(twice_q, period);
}

ModeIndex ModeIndex::at(int position, int period) { return from_twice_q(2 * position + 1, period); }

double ModeIndex::k() const noexcept { return 2.0 * std::numbers::pi * q() / period_; }

std::vector<ModeIndex> mode_set(int period) {
  std::vector<ModeIndex> modes;
  modes.reserve(static_cast<std::size_t>(period));
  for (int i = 0; i < period; ++i) modes.push_back(ModeIndex::at(i, period));
  return modes;
}

BlochMatrix bloch_hamiltonian(const ChainParams& params, const ModeIndex& mode) {
  params.validate();
  if (mode.period() != params.n_dimers) throw_invalid("mode does not belong to this chain");

  const double d = params.delta;
  const Complex phase = std::polar(1.0, -mode.k());
  const Complex z = -((1.0 + d) + (1.0 - d) * phase);
  const Complex w = -params.gamma * ((1.0 + d) - (1.0 - d) * phase);

  Matrix4c h = Matrix4c::Zero();
  h(0, 1) = z;
  h(0, 3) = w;
  h(1, 0) = std::conj(z);
  h(1, 2) = -std::conj(w);
  h(2, 1) = -w;
  h(2, 3) = -z;
  h(3, 0) = std::conj(w);
  h(3, 2) = -std::conj(z);
  return {h, z, w};
}

BandPair dispersion(const ChainParams& params, const ModeIndex& mode, std::array<Branch, 2>& branch) {
  params.validate();
  if (mode.period() != params.n_dimers) throw_invalid("mode does not belong to this chain");
  const double g = params.gamma;
  const double d = params.delta;
  const double x = std::numbers::pi * mode.q() / mode.period();
  const double c2 = std::cos(x) * std::cos(x);
  const double s2 = std::sin(x) * std::sin(x);
  const double plus = 2.0 * std::sqrt((1 + g * d) * (1 + g * d) * c2 + (d + g) * (d + g) * s2);
  const double minus = 2.0 * std::sqrt((1 - g * d) * (1 - g * d) * c2 + (d - g) * (d - g) * s2);
  if (plus >= minus) {
    branch = {Branch::Plus, Branch::Minus};
    return {plus, minus};
  }
  branch = {Branch::Minus, Branch::Plus};
  return {minus, plus};
}

BandPair dispersion(const ChainParams& params, const ModeIndex& mode) {
  std::array<Branch, 2> unused{};
  return dispersion(params, mode, unused);
}

void fix_gauge(Matrix4c& vectors) {
  for (int c = 0; c < 4; ++c) {
    int best = 0;
    double best_abs = -1.0;
    for (int r = 0; r < 4; ++r) {
      const double a = std::abs(vectors(r, c));
      // Strictly greater keeps the lowest row on ties; the slack absorbs
      // rounding so near-ties resolve the same way on every platform.
      if (a > best_abs * (1.0 + 1e-12) + 1e-15) {
        best = r;
        best_abs = a;
      }
    }
    if (best_abs <= 0.0) continue;
    const Complex phase = vectors(best, c) / best_abs;
    vectors.col(c) *= std::conj(phase);
    vectors(best, c) = Complex(vectors(best, c).real(), 0.0);
  }
}

ModeSpectrum eigensystem_of(const Matrix4c& h, const ModeIndex& mode) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(h);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::EigenFailure, "4x4 Hermitian eigensolver did not converge");

  // Ascending eigenvalues are (-w1, -w2, +w2, +w1).
  const auto& lambda = solver.eigenvalues();
  Matrix4c sorted = solver.eigenvectors();
  std::array<double, 4> values{lambda(0), lambda(1), lambda(2), lambda(3)};

  for (int first = 0; first < 4;) {
    int last = first;
    while (last + 1 < 4 && values[last + 1] - values[first] <= kDegeneracyTolerance) ++last;
    canonicalize_subspace(sorted, first, last - first + 1);
    first = last + 1;
  }

  ModeSpectrum spec{mode, 0.0, 0.0, Matrix4c::Zero()};
  constexpr std::array<int, 4> order{3, 2, 0, 1};
  for (int c = 0; c < 4; ++c) spec.eigvecs.col(c) = sorted.col(order[c]);
  fix_gauge(spec.eigvecs);
  spec.omega1 = 0.5 * (values[3] - values[0]);
  spec.omega2 = 0.5 * (values[2] - values[1]);
  return spec;
}

ModeSpectrum mode_eigensystem(const ChainParams& params, const ModeIndex& mode) {
  const BlochMatrix bloch = bloch_hamiltonian(params, mode);
  ModeSpectrum spec = eigensystem_of(bloch.entries, mode);
  dispersion(params, mode, spec.branch);
  return spec;
}

Phase classify_phase(double gamma, double delta) {
  if (!(gamma > 0.0)) throw_invalid("gamma must be > 0");
  if (!(delta >= 0.0)) throw_invalid("delta must be >= 0");
  const double gd = gamma * gamma * delta * delta - 1.0;
  const double dg = delta * delta - gamma * gamma;
  // At gamma = delta = 1 both hold; the gamma-delta line wins.
  if (std::abs(gd) <= kPhaseBoundaryTolerance) return Phase::CriticalGammaDelta;
  if (std::abs(dg) <= kPhaseBoundaryTolerance) return Phase::CriticalDeltaGamma;
  const bool strong = gamma * delta > 1.0;
  const bool above = delta > gamma;
  if (!strong) return above ? Phase::DimerAntialignedZ : Phase::FerromagnetX;
  return above ? Phase::Spin1AntiferroX : Phase::DimerAlignedZ;
}

int phase_region(Phase phase) noexcept {
  switch (phase) {
    case Phase::FerromagnetX: return 1;
    case Phase::Spin1AntiferroX: return 2;
    case Phase::DimerAlignedZ: return 3;
    case Phase::DimerAntialignedZ: return 4;
    default: return 0;
  }
}

std::string_view phase_label(Phase phase) noexcept {
  switch (phase) {
    case Phase::FerromagnetX: return "ferromagnet-x";
    case Phase::Spin1AntiferroX: return "spin1-antiferromagnet-x";
    case Phase::DimerAlignedZ: return "dimer-aligned-z";
    case Phase::DimerAntialignedZ: return "dimer-antialigned-z";
    case Phase::CriticalGammaDelta: return "critical-gamma-delta";
    case Phase::CriticalDeltaGamma: return "critical-delta-gamma";
  }
  return "unknown";
}

bool is_critical(Phase phase) noexcept {
  return phase == Phase::CriticalGammaDelta || phase == Phase::CriticalDeltaGamma;
}

double ground_energy(const ChainParams& params) {
  params.validate();
  CompensatedSum sum;
  for (const auto& mode : mode_set(params.n_dimers)) {
    const BandPair w = dispersion(params, mode);
    sum.add(w.omega1);
    sum.add(w.omega2);
  }
  return -0.5 * sum.value();
}

}  // namespace qb
