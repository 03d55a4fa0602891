#pragma once

#include <span>
#include <vector>

namespace qb {

/// A finite sum  sum_j a_j cos(f_j t)  with terms kept in a fixed order.
///
/// Both the XY quench and the Ising closed form reduce to this shape once the
/// per-mode algebra is done, and all trace evaluation goes through it.
/// Evaluation order is fixed (term order, compensated) so results are
/// bitwise reproducible regardless of how time points are distributed over
/// workers.
class SpectralSeries {
 public:
  struct Term {
    double frequency;
    double amplitude;
  };

  SpectralSeries() = default;
  /// `size` is the number of modes (dimers for XY, sites for Ising), kept for
  /// per-unit normalisation downstream.
  explicit SpectralSeries(int size) : size_(size) {}

  void add(double frequency, double amplitude) { terms_.push_back({frequency, amplitude}); }

  std::span<const Term> terms() const noexcept { return terms_; }
  int size() const noexcept { return size_; }

  double evaluate(double t) const;

  /// Values at t_i = (first + i) * dt, i in [0, count).
  std::vector<double> evaluate_grid(long first, long count, double dt, unsigned workers) const;

  /// Sum of amplitudes whose |frequency| <= tolerance: the infinite-time mean.
  double constant_part(double tolerance = 1e-10) const;

  /// Largest |frequency| present.
  double max_frequency() const noexcept;

 private:
  int size_ = 0;
  std::vector<Term> terms_;
};

/// Number of points of the grid {0, dt, 2dt, ...} not exceeding t_end.
long grid_point_count(double t_end, double dt);

}  // namespace qb
