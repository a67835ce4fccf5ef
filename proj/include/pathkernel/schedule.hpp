#pragma once

// Schedules decide, step by step, how much of the tangent is moved into the
// kernel weight. A schedule only ever sees a HistoryView: the step index, the
// time and the current state. The Brownian increment of the step is not part
// of the view, which keeps every schedule adapted.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

namespace pathkernel {

struct HistoryView {
  std::size_t step = 0;
  double dt = 0.0;
  std::span<const double> state;

  double time() const noexcept { return static_cast<double>(step) * dt; }
};

class Schedule {
 public:
  using Rule = std::function<double(const HistoryView&)>;

  /// alpha == 0 recovers pure path perturbation.
  static Schedule constant(double alpha);
  static Schedule zero();
  /// alpha == 1/dt; pure kernel differentiation for constant sigma.
  static Schedule pure_kernel(double dt);
  /// alpha_n = 1/(T - n dt), last value exactly 1/dt. Finite horizon only.
  static Schedule bel(double horizon);
  static Schedule state_dependent(std::string label, Rule rule);

  /// Parses the CLI selectors "const:<a>", "zero", "kernel" and "bel".
  /// `dt` and `horizon` feed "kernel" and "bel".
  static Schedule parse(const std::string& selector, double dt, double horizon);

  /// Throws ScheduleError if the value is not finite.
  double alpha(const HistoryView& view) const;

  const std::string& label() const noexcept { return label_; }
  bool identically_zero() const noexcept {
    return constant_ && *constant_ == 0.0;
  }
  bool finite_horizon_only() const noexcept { return bel_horizon_.has_value(); }
  std::optional<double> constant_value() const noexcept { return constant_; }

  nlohmann::json describe() const;

 private:
  Schedule() = default;

  std::string label_;
  std::optional<double> constant_;
  std::optional<double> bel_horizon_;
  Rule rule_;
};

}  // namespace pathkernel
