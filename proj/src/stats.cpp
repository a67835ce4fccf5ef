#include "pathkernel/stats.hpp"

#include <cmath>

#include "pathkernel/errors.hpp"

namespace pathkernel {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    compensation_ += (sum_ - t) + x;
  else
    compensation_ += (x - t) + sum_;
  sum_ = t;
}

Summary summarize(std::span<const double> samples) {
  if (samples.size() < 2)
    throw ConfigError("summarize: need at least two samples");
  const auto n = static_cast<double>(samples.size());
  CompensatedSum total;
  for (double x : samples) total.add(x);
  const double mean = total.value() / n;
  CompensatedSum squares;
  for (double x : samples) squares.add((x - mean) * (x - mean));
  Summary s;
  s.mean = mean;
  s.variance = squares.value() / (n - 1.0);
  s.std_error = std::sqrt(s.variance / n);
  s.count = samples.size();
  return s;
}

}  // namespace pathkernel
