#include "pathkernel/schedule.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "pathkernel/errors.hpp"

namespace pathkernel {

Schedule Schedule::constant(double alpha) {
  if (!std::isfinite(alpha)) throw ConfigError("constant schedule: alpha must be finite");
  if (alpha < 0.0)
    std::cerr << "warning: negative schedule alpha " << alpha
              << " amplifies the tangent\n";
  Schedule s;
  std::ostringstream label;
  label.precision(17);
  label << "const:" << alpha;
  s.label_ = label.str();
  s.constant_ = alpha;
  return s;
}

Schedule Schedule::zero() {
  Schedule s = constant(0.0);
  s.label_ = "zero";
  return s;
}

Schedule Schedule::pure_kernel(double dt) {
  if (!(dt > 0.0)) throw ConfigError("pure kernel schedule: dt must be positive");
  Schedule s = constant(1.0 / dt);
  s.label_ = "kernel";
  return s;
}

Schedule Schedule::bel(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ConfigError("bel schedule: horizon must be positive");
  Schedule s;
  s.label_ = "bel";
  s.bel_horizon_ = horizon;
  // Count remaining steps in integers so the last step is exactly 1/dt.
  s.rule_ = [horizon](const HistoryView& view) {
    const auto total = static_cast<long long>(std::llround(horizon / view.dt));
    const long long remaining = total - static_cast<long long>(view.step);
    if (remaining <= 0)
      throw ScheduleError("bel schedule evaluated at or beyond the horizon");
    return 1.0 / (static_cast<double>(remaining) * view.dt);
  };
  return s;
}

Schedule Schedule::state_dependent(std::string label, Rule rule) {
  if (!rule) throw ConfigError("state-dependent schedule: empty rule");
  Schedule s;
  s.label_ = std::move(label);
  s.rule_ = std::move(rule);
  return s;
}

Schedule Schedule::parse(const std::string& selector, double dt,
                         double horizon) {
  if (selector == "zero") return zero();
  if (selector == "kernel") return pure_kernel(dt);
  if (selector == "bel") return bel(horizon);
  if (selector.rfind("const:", 0) == 0) {
    const std::string number = selector.substr(6);
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != number.size())
      throw ConfigError("bad schedule selector '" + selector + "'");
    return constant(alpha);
  }
  throw ConfigError("unknown schedule '" + selector +
                    "' (expected const:<alpha>, zero, kernel or bel)");
}

double Schedule::alpha(const HistoryView& view) const {
  if (constant_) return *constant_;
  const double a = rule_(view);
  if (!std::isfinite(a)) {
    std::ostringstream msg;
    msg << "schedule '" << label_ << "' returned non-finite alpha at step "
        << view.step;
    throw ScheduleError(msg.str());
  }
  return a;
}

nlohmann::json Schedule::describe() const {
  nlohmann::json j;
  j["label"] = label_;
  if (constant_) j["alpha"] = *constant_;
  if (bel_horizon_) j["horizon"] = *bel_horizon_;
  j["kind"] = constant_ ? "constant" : (bel_horizon_ ? "bel" : "state_dependent");
  return j;
}

}  // namespace pathkernel
