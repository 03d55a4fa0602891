#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qb {

using Complex = std::complex<double>;

// Neumaier-compensated accumulator. Summation order is the caller's
// responsibility; the result depends only on the sequence of add() calls.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads using contiguous
// blocks. fn must only write to slots owned by index i, so results never
// depend on the worker count.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (n == 0) return;
  const std::size_t w = std::clamp<std::size_t>(workers, 1, n);
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t block = (n + w - 1) / w;
  std::vector<std::exception_ptr> failures(w);
  {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (std::size_t b = 0; b < w; ++b) {
      const std::size_t lo = b * block;
      const std::size_t hi = std::min(n, lo + block);
      if (lo >= hi) break;
      pool.emplace_back([lo, hi, b, &fn, &failures] {
        try {
          for (std::size_t i = lo; i < hi; ++i) fn(i);
        } catch (...) {
          failures[b] = std::current_exception();
        }
      });
    }
  }
  // Lowest block first, so the reported error matches a serial run.
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

}  // namespace qb
