#pragma once

#include <span>
#include <vector>

namespace bro {

/// Exact floating-point accumulator (Shewchuk's non-overlapping expansion).
///
/// value() is the correctly rounded sum of everything added so far, which
/// makes it independent of the order and batching of the additions.
class ExactSum {
 public:
  ExactSum() = default;

  void add(double x);
  void add(std::span<const double> xs) {
    for (double x : xs) add(x);
  }

  /// Correctly rounded value of the sum plus `offset`.
  [[nodiscard]] double value(double offset = 0.0) const;

  [[nodiscard]] const std::vector<double>& partials() const noexcept { return partials_; }

 private:
  std::vector<double> partials_;
};

}  // namespace bro
