#pragma once

#include <Eigen/Dense>
#include <span>
#include <variant>
#include <vector>

#include "qbattery/numeric.hpp"

namespace qb::ed {

// Brute-force reference: dense matrices in the full 2^N spin space. Nothing
// here goes through Jordan-Wigner or momentum space.

struct DimerizedXY {
  double gamma;
  double delta;
};

struct TransverseIsing {
  double h;
};

using SpinModel = std::variant<DimerizedXY, TransverseIsing>;

inline constexpr int kMaxSites = 12;

/// Basis state |b>: bit j of b is site j+1, bit set = spin down (sigma^z = -1).
struct SpinHamiltonian {
  int n_sites = 0;
  SpinModel kind;
  // Both models are real in the sigma^z basis, so a real symmetric matrix is
  // the full Hermitian operator.
  Eigen::MatrixXd matrix;
};

/// Periodic chain, built term by term from Pauli products. Rejects N outside
/// [2, 12] and odd N for the XY model.
SpinHamiltonian build_hamiltonian(const SpinModel& kind, int n_sites);

/// Diagonal of the parity operator prod_j sigma^z_j.
Eigen::VectorXd parity_diagonal(int n_sites);

struct SectorGroundState {
  double energy = 0.0;
  Eigen::VectorXcd state;          // full-space vector, normalised
  double even_gap = 0.0;           // first excited minus ground, even sector
  double odd_ground_energy = 0.0;  // lowest odd-sector energy
  bool degenerate_in_sector = false;
  bool near_sector_degeneracy = false;  // |E_even - E_odd| < 1e-10
};

inline constexpr double kDegeneracyGap = 1e-10;

SectorGroundState even_sector_ground_state(const SpinHamiltonian& h);

/// Exact evolution under a fixed Hamiltonian via its full eigendecomposition.
class Propagator {
 public:
  explicit Propagator(const SpinHamiltonian& h);
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi0, double t) const;

 private:
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;
};

double expectation(const Eigen::MatrixXd& op, const Eigen::VectorXcd& psi);

struct OracleTrace {
  std::vector<double> times;
  std::vector<double> values;
  double ground_energy = 0.0;
  bool degenerate_ground = false;
  bool near_sector_degeneracy = false;
};

/// Delta E(t) = <psi(t)|H_B|psi(t)> - E_gs with psi(0) the even-sector ground
/// state of `battery` and psi(t) = exp(-i H' t) psi(0).
OracleTrace oracle_energy_trace(const SpinHamiltonian& battery, const SpinHamiltonian& charger,
                                std::span<const double> times);

}  // namespace qb::ed
