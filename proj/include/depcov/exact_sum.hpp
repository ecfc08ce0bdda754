#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

namespace depcov {

// Correctly rounded floating-point summation (Shewchuk's partials algorithm,
// as used by Python's math.fsum). The result is the exact sum rounded once,
// so it does not depend on the order in which terms are added. Statistics
// rely on this for bit-identical results under re-indexing of observations.
class ExactSum {
 public:
  void add(double x) {
    if (!std::isfinite(x)) {
      special_ += x;
      has_special_ = true;
      return;
    }
    std::size_t i = 0;
    for (std::size_t j = 0; j < count_; ++j) {
      double y = partials_[j];
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_[i] = x;
    count_ = i + 1;
  }

  double result() const;
  void clear() {
    count_ = 0;
    special_ = 0.0;
    has_special_ = false;
  }

 private:
  // Partials are non-overlapping, so the double exponent range bounds their
  // number by about 40.
  std::array<double, 64> partials_{};
  std::size_t count_ = 0;
  // inf/nan terms bypass the partials and are propagated through this sum
  double special_ = 0.0;
  bool has_special_ = false;
};

double exact_sum(std::span<const double> values);

}  // namespace depcov
