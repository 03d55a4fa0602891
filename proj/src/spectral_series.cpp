#include "qbattery/spectral_series.hpp"

#include <cmath>

#include "qbattery/numeric.hpp"

namespace qb {

double SpectralSeries::evaluate(double t) const {
  CompensatedSum sum;
  for (const Term& term : terms_) sum.add(term.amplitude * std::cos(term.frequency * t));
  return sum.value();
}

std::vector<double> SpectralSeries::evaluate_grid(long first, long count, double dt,
                                                  unsigned workers) const {
  std::vector<double> values(static_cast<std::size_t>(count > 0 ? count : 0));
  parallel_for(values.size(), workers, [&](std::size_t i) {
    values[i] = evaluate(static_cast<double>(first + static_cast<long>(i)) * dt);
  });
  return values;
}

double SpectralSeries::constant_part(double tolerance) const {
  CompensatedSum sum;
  for (const Term& term : terms_)
    if (std::abs(term.frequency) <= tolerance) sum.add(term.amplitude);
  return sum.value();
}

double SpectralSeries::max_frequency() const noexcept {
  double f = 0.0;
  for (const Term& term : terms_) f = std::max(f, std::abs(term.frequency));
  return f;
}

long grid_point_count(double t_end, double dt) {
  return static_cast<long>(std::floor(t_end / dt + 1e-9)) + 1;
}

}  // namespace qb
