#include "qbattery/ed_oracle.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "qbattery/error.hpp"

namespace qb::ed {

namespace {

using Index = Eigen::Index;

// sigma^x_a sigma^x_b + optional sigma^y_a sigma^y_b on one bond, scaled.
void add_bond(Eigen::MatrixXd& m, int a, int b, double cxx, double cyy) {
  const Index dim = m.rows();
  const unsigned mask = (1u << a) | (1u << b);
  for (Index s = 0; s < dim; ++s) {
    const auto state = static_cast<unsigned>(s);
    const bool same = ((state >> a) & 1u) == ((state >> b) & 1u);
    // sigma^y sigma^y picks up i*i = -1 when both spins agree, +1 otherwise.
    const double yy = same ? -1.0 : 1.0;
    m(static_cast<Index>(state ^ mask), s) += cxx + cyy * yy;
  }
}

void add_field(Eigen::MatrixXd& m, int a, double coeff) {
  for (Index s = 0; s < m.rows(); ++s) {
    const double z = ((static_cast<unsigned>(s) >> a) & 1u) ? -1.0 : 1.0;
    m(s, s) += coeff * z;
  }
}

struct Builder {
  Eigen::MatrixXd& m;
  int n;

  void operator()(const DimerizedXY& xy) const {
    for (int j = 1; j <= n; ++j) {
      const double strength = 1.0 - ((j % 2 == 0) ? 1.0 : -1.0) * xy.delta;
      const int a = j - 1;
      const int b = j % n;
      add_bond(m, a, b, -strength * (1.0 + xy.gamma) / 2.0, -strength * (1.0 - xy.gamma) / 2.0);
    }
  }

  void operator()(const TransverseIsing& ising) const {
    for (int j = 0; j < n; ++j) {
      add_bond(m, j, (j + 1) % n, 0.5, 0.0);
      add_field(m, j, 0.5 * ising.h);
    }
  }
};

}  // namespace

SpinHamiltonian build_hamiltonian(const SpinModel& kind, int n_sites) {
  if (n_sites < 2 || n_sites > kMaxSites) {
    std::ostringstream os;
    os << "ED supports 2 <= N <= " << kMaxSites << ", got " << n_sites;
    throw_invalid(os.str());
  }
  if (std::holds_alternative<DimerizedXY>(kind) && n_sites % 2 != 0)
    throw_invalid("the dimerized XY chain needs an even number of sites");

  const Index dim = Index{1} << n_sites;
  SpinHamiltonian h{n_sites, kind, Eigen::MatrixXd::Zero(dim, dim)};
  std::visit(Builder{h.matrix, n_sites}, kind);
  return h;
}

Eigen::VectorXd parity_diagonal(int n_sites) {
  const Index dim = Index{1} << n_sites;
  Eigen::VectorXd p(dim);
  for (Index s = 0; s < dim; ++s) p(s) = (std::popcount(static_cast<unsigned>(s)) % 2 == 0) ? 1.0 : -1.0;
  return p;
}

SectorGroundState even_sector_ground_state(const SpinHamiltonian& h) {
  const Index dim = h.matrix.rows();
  std::vector<Index> even;
  std::vector<Index> odd;
  for (Index s = 0; s < dim; ++s)
    (std::popcount(static_cast<unsigned>(s)) % 2 == 0 ? even : odd).push_back(s);

  auto block = [&](const std::vector<Index>& idx) {
    Eigen::MatrixXd b(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
    for (Index i = 0; i < b.rows(); ++i)
      for (Index j = 0; j < b.cols(); ++j) b(i, j) = h.matrix(idx[i], idx[j]);
    return b;
  };

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> even_solver(block(even));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> odd_solver(block(odd), Eigen::EigenvaluesOnly);
  if (even_solver.info() != Eigen::Success || odd_solver.info() != Eigen::Success)
    throw Error(ErrorCode::EigenFailure, "dense eigensolver did not converge");

  SectorGroundState g;
  g.energy = even_solver.eigenvalues()(0);
  g.even_gap = even_solver.eigenvalues().size() > 1 ? even_solver.eigenvalues()(1) - g.energy : 0.0;
  g.odd_ground_energy = odd_solver.eigenvalues()(0);
  g.degenerate_in_sector = even_solver.eigenvalues().size() > 1 && g.even_gap < kDegeneracyGap;
  g.near_sector_degeneracy = std::abs(g.energy - g.odd_ground_energy) < kDegeneracyGap;

  g.state = Eigen::VectorXcd::Zero(dim);
  const auto v = even_solver.eigenvectors().col(0);
  for (std::size_t i = 0; i < even.size(); ++i) g.state(even[i]) = v(static_cast<Index>(i));
  g.state.normalize();
  return g;
}

Propagator::Propagator(const SpinHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "dense eigensolver did not converge");
  energies_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Eigen::VectorXcd Propagator::evolve(const Eigen::VectorXcd& psi0, double t) const {
  // The eigenvectors are real; keep the products real-by-complex.
  const Eigen::VectorXd re0 = vectors_.transpose() * psi0.real();
  const Eigen::VectorXd im0 = vectors_.transpose() * psi0.imag();
  Eigen::VectorXd re(re0.size());
  Eigen::VectorXd im(im0.size());
  for (Index i = 0; i < re.size(); ++i) {
    const Complex c = Complex(re0(i), im0(i)) * std::polar(1.0, -energies_(i) * t);
    re(i) = c.real();
    im(i) = c.imag();
  }
  Eigen::VectorXcd out(re.size());
  out.real() = vectors_ * re;
  out.imag() = vectors_ * im;
  return out;
}

double expectation(const Eigen::MatrixXd& op, const Eigen::VectorXcd& psi) {
  // <psi|A|psi> for real symmetric A: the cross terms cancel.
  const Eigen::VectorXd re = psi.real();
  const Eigen::VectorXd im = psi.imag();
  return re.dot(op * re) + im.dot(op * im);
}

OracleTrace oracle_energy_trace(const SpinHamiltonian& battery, const SpinHamiltonian& charger,
                                std::span<const double> times) {
  if (battery.n_sites != charger.n_sites) throw_invalid("battery and charger must have the same size");
  const SectorGroundState g = even_sector_ground_state(battery);
  const Propagator propagate(charger);

  OracleTrace out;
  out.ground_energy = g.energy;
  out.degenerate_ground = g.degenerate_in_sector;
  out.near_sector_degeneracy = g.near_sector_degeneracy;
  out.times.assign(times.begin(), times.end());
  out.values.reserve(times.size());
  for (double t : times) out.values.push_back(expectation(battery.matrix, propagate.evolve(g.state, t)) - g.energy);
  return out;
}

}  // namespace qb::ed
