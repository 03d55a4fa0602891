#pragma once

#include <Eigen/Dense>
#include <array>
#include <string_view>
#include <vector>

#include "qbattery/numeric.hpp"

namespace qb {

using Matrix4c = Eigen::Matrix<Complex, 4, 4>;

/// Parameters of one dimerized XY chain (J = 1).
struct ChainParams {
  double gamma = 1.0;
  double delta = 0.0;
  int n_dimers = 2;
  double energy_scale = 1.0;

  /// Throws InvalidArgument unless gamma > 0, delta >= 0, n_dimers >= 2 and J == 1.
  void validate() const;
};

/// Half-integer momentum label q in {1/2, 3/2, ..., period - 1/2}.
///
/// Stored as the odd integer 2q so the half-integer constraint holds by
/// construction. `period` is the number of dimers for the XY chain and the
/// number of sites for the Ising chain.
class ModeIndex {
 public:
  /// Throws InvalidArgument unless twice_q is odd and 1 <= twice_q <= 2*period - 1.
  static ModeIndex from_twice_q(int twice_q, int period);

  /// The `position`-th mode in ascending order (0-based).
  static ModeIndex at(int position, int period);

  int twice_q() const noexcept { return twice_q_; }
  int period() const noexcept { return period_; }
  int position() const noexcept { return (twice_q_ - 1) / 2; }
  double q() const noexcept { return 0.5 * twice_q_; }
  /// k = 2 pi q / period, in (0, 2 pi).
  double k() const noexcept;

 private:
  ModeIndex(int twice_q, int period) : twice_q_(twice_q), period_(period) {}
  int twice_q_;
  int period_;
};

std::vector<ModeIndex> mode_set(int period);

struct BlochMatrix {
  Matrix4c entries;
  Complex zq;
  Complex wq;
};

struct BandPair {
  double omega1 = 0.0;
  double omega2 = 0.0;
};

/// Which sign of the +/- in the closed-form dispersion a sorted band came from.
enum class Branch { Plus, Minus };

/// Eigenvector phase convention that was applied to a ModeSpectrum.
enum class GaugeTag { LargestEntryRealPositive, Custom };

struct ModeSpectrum {
  ModeIndex mode;
  double omega1 = 0.0;
  double omega2 = 0.0;
  // Columns ordered to eigenvalues (+omega1, +omega2, -omega1, -omega2).
  Matrix4c eigvecs;
  GaugeTag gauge = GaugeTag::LargestEntryRealPositive;
  std::array<Branch, 2> branch{Branch::Plus, Branch::Minus};

  BandPair bands() const noexcept { return {omega1, omega2}; }
};

enum class Phase {
  FerromagnetX,        // region 1
  Spin1AntiferroX,     // region 2
  DimerAlignedZ,       // region 3
  DimerAntialignedZ,   // region 4
  CriticalGammaDelta,  // gamma^2 delta^2 = 1
  CriticalDeltaGamma,  // delta^2 = gamma^2
};

/// Band-structure tolerance on the boundary polynomials.
inline constexpr double kPhaseBoundaryTolerance = 1e-12;

/// Per-mode 4x4 Bloch matrix in the Nambu basis (A_q, B_q, A+_{N-q}, B+_{N-q}).
BlochMatrix bloch_hamiltonian(const ChainParams& params, const ModeIndex& mode);

/// Closed-form bands, sorted so that omega1 >= omega2 >= 0.
BandPair dispersion(const ChainParams& params, const ModeIndex& mode);

/// Same as dispersion() but also reports the branch each sorted band came from.
BandPair dispersion(const ChainParams& params, const ModeIndex& mode, std::array<Branch, 2>& branch);

/// Gauge-fixed eigensystem of the Bloch matrix. Throws EigenFailure if the
/// solver does not converge.
ModeSpectrum mode_eigensystem(const ChainParams& params, const ModeIndex& mode);

/// Eigensystem of an arbitrary Hermitian 4x4 matrix with particle-hole
/// spectrum, ordered and gauge fixed the same way as mode_eigensystem.
ModeSpectrum eigensystem_of(const Matrix4c& h, const ModeIndex& mode);

/// Makes the largest-modulus entry of every column real and positive (ties go
/// to the lowest row).
void fix_gauge(Matrix4c& vectors);

Phase classify_phase(double gamma, double delta);
int phase_region(Phase phase) noexcept;  // 1..4, or 0 on a critical line
std::string_view phase_label(Phase phase) noexcept;
bool is_critical(Phase phase) noexcept;

/// -(1/2) sum_q (omega1 + omega2), the energy of the quasiparticle vacuum.
double ground_energy(const ChainParams& params);

}  // namespace qb
