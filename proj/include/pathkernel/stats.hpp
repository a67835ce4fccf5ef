#pragma once

#include <cstddef>
#include <span>

namespace pathkernel {

/// Neumaier compensated summation; the result depends only on the order of
/// the added terms.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct Summary {
  double mean = 0.0;
  double std_error = 0.0;
  /// Unbiased sample variance of the inputs.
  double variance = 0.0;
  std::size_t count = 0;
};

/// Mean and standard error of i.i.d. samples (or batch means). Needs at least
/// two samples; throws ConfigError otherwise.
Summary summarize(std::span<const double> samples);

}  // namespace pathkernel
