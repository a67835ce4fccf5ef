#include "pathkernel/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pathkernel/errors.hpp"
#include "pathkernel/parallel.hpp"
#include "pathkernel/stats.hpp"

namespace pathkernel {

namespace {

void check_point(const SdeModel& model, const ParamPoint& point) {
  if (point.id != model.param())
    throw ConfigError("parameter '" + to_string(point.id) +
                      "' is not the active parameter of model " + model.name());
  if (!std::isfinite(point.gamma)) throw ConfigError("gamma must be finite");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

State start_state(const SdeModel& model, double gamma, const ErgodicOptions& o) {
  if (o.start.empty()) return model.initial_state(gamma);
  if (o.start.size() != model.dim())
    throw ConfigError("orbit start has the wrong dimension");
  return o.start;
}

std::size_t resolve_batch(const ErgodicOptions& o) {
  const std::size_t batch = o.batch_length == 0 ? 10 * o.window : o.batch_length;
  if (batch == 0) throw ConfigError("batch length must be positive");
  if (o.steps % batch != 0)
    throw ConfigError("batch length must divide the number of orbit steps");
  if (o.steps / batch < 2) throw ConfigError("need at least two batches");
  return batch;
}

}  // namespace

nlohmann::json to_json(const SensitivityEstimate& e) {
  nlohmann::json j;
  j["value"] = e.value;
  j["std_error"] = e.std_error;
  j["sample_variance"] = e.sample_variance;
  j["phi_avg"] = e.phi_avg;
  j["phi_std_error"] = e.phi_std_error;
  j["n_samples"] = e.n_samples;
  j["overflow_count"] = e.overflow_count;
  j["first_overflow_step"] =
      e.first_overflow_step ? nlohmann::json(*e.first_overflow_step) : nlohmann::json();
  j["max_tangent_norm"] = e.max_tangent_norm;
  j["metadata"] = e.metadata;
  return j;
}

std::vector<PathAccumulators> simulate_paths(const SdeModel& model,
                                             const Observable& observable,
                                             const Schedule& schedule,
                                             const ParamPoint& point,
                                             const FiniteTimeOptions& options) {
  check_point(model, point);
  if (options.steps < 1) throw ConfigError("need at least one time step");
  std::vector<PathAccumulators> results(options.paths);
  parallel_for(options.paths, options.workers, [&](std::size_t l) {
    RngStream stream(options.seed, l);
    results[l] = simulate_path(model, observable, schedule, point, options.dt,
                               options.steps, stream);
  });
  return results;
}

SensitivityEstimate estimate_finite_time(const SdeModel& model,
                                         const Observable& observable,
                                         const Schedule& schedule,
                                         const ParamPoint& point,
                                         const FiniteTimeOptions& options) {
  if (options.paths < 2) throw ConfigError("need at least two sample paths");
  const auto results = simulate_paths(model, observable, schedule, point, options);

  SensitivityEstimate est;
  std::vector<double> phis;
  phis.reserve(results.size());
  for (const auto& r : results) {
    est.max_tangent_norm = std::max(est.max_tangent_norm, r.max_tangent_norm);
    if (r.overflowed) {
      ++est.overflow_count;
      if (!est.first_overflow_step || *r.overflow_step < *est.first_overflow_step)
        est.first_overflow_step = r.overflow_step;
      continue;
    }
    phis.push_back(r.phi);
  }

  if (est.overflow_count > 0 &&
      (!options.tolerate_overflow || phis.size() < 2)) {
    std::ostringstream msg;
    msg << est.overflow_count << " of " << results.size()
        << " paths overflowed under schedule '" << schedule.label()
        << "'; first overflow at step " << *est.first_overflow_step;
    throw OverflowError(msg.str(), *est.first_overflow_step);
  }

  const Summary phi_summary = summarize(phis);
  const double phi_avg = phi_summary.mean;
  std::vector<double> summands;
  summands.reserve(phis.size());
  for (const auto& r : results)
    if (!r.overflowed) summands.push_back(r.s1 + (r.phi - phi_avg) * r.s2);
  const Summary s = summarize(summands);

  est.value = s.mean;
  est.std_error = s.std_error;
  est.sample_variance = s.variance;
  est.phi_avg = phi_avg;
  est.phi_std_error = phi_summary.std_error;
  est.n_samples = summands.size();
  est.metadata = {{"estimator", "path_kernel_finite_time"},
                  {"model", model.describe()},
                  {"observable", observable.name()},
                  {"param", to_string(point.id)},
                  {"gamma", point.gamma},
                  {"dt", options.dt},
                  {"steps", options.steps},
                  {"horizon", options.dt * static_cast<double>(options.steps)},
                  {"paths", options.paths},
                  {"seed", options.seed},
                  {"schedule", schedule.describe()},
                  {"std_error_method", "per_path"}};
  return est;
}

SensitivityEstimate estimate_ergodic(const SdeModel& model,
                                     const Observable& observable,
                                     const Schedule& schedule,
                                     const ParamPoint& point,
                                     const ErgodicOptions& options) {
  check_point(model, point);
  if (options.window < 1) throw ConfigError("decorrelation window must be >= 1 step");
  if (options.steps < options.window)
    throw ConfigError("orbit must be at least as long as the window");
  if (schedule.finite_horizon_only())
    throw ConfigError("schedule '" + schedule.label() +
                      "' is only defined on a finite horizon");
  const std::size_t batch = resolve_batch(options);
  const std::size_t m = model.dim();
  const std::size_t nw = options.window;

  RngStream stream(options.seed, options.path_index);
  Stepper stepper(model, point, options.dt);
  State x = start_state(model, point.gamma, options);
  std::vector<double> db(m);
  for (std::size_t n = 0; n < options.spinup; ++n) {
    stream.gaussian_increment(options.dt, db);
    stepper.advance_state(x, db);
    if (!is_finite(x))
      throw OverflowError("state overflowed during spin-up", n);
  }

  TangentVector v = model.initial_tangent();
  std::vector<double> grad(m);
  std::vector<double> ring(nw, 0.0);
  double window_sum = 0.0;

  CompensatedSum sum_phi, sum_s1, sum_s2, sum_phi_s2;
  struct BatchSums {
    CompensatedSum phi, s1, s2, phi_s2;
  };
  std::vector<BatchSums> batches(options.steps / batch);

  SensitivityEstimate est;
  est.max_tangent_norm = norm2(v);
  const std::size_t total = nw + options.steps;
  for (std::size_t n = 0; n < total; ++n) {
    stream.gaussian_increment(options.dt, db);
    const double alpha = schedule.alpha(HistoryView{n, options.dt, x});

    if (n >= nw) {
      const double phi = observable.value(x);
      observable.gradient(x, grad);
      const double s1 = dot(grad, v);
      const double s2 = window_sum;
      sum_phi.add(phi);
      sum_s1.add(s1);
      sum_s2.add(s2);
      sum_phi_s2.add(phi * s2);
      auto& b = batches[(n - nw) / batch];
      b.phi.add(phi);
      b.s1.add(s1);
      b.s2.add(s2);
      b.phi_s2.add(phi * s2);
    }

    const double increment = stepper.advance(x, v, alpha, db);
    double& slot = ring[n % nw];
    window_sum += increment - slot;
    slot = increment;
    if ((n + 1) % nw == 0) {
      window_sum = 0.0;
      for (double i : ring) window_sum += i;
    }

    const double vnorm = norm2(v);
    est.max_tangent_norm = std::max(est.max_tangent_norm, vnorm);
    if (!is_finite(x) || !std::isfinite(vnorm) || vnorm > kTangentOverflow ||
        !std::isfinite(window_sum)) {
      if (!options.tolerate_overflow) {
        std::ostringstream msg;
        msg << "orbit overflowed under schedule '" << schedule.label()
            << "' at step " << n << " (|v| = " << vnorm << ")";
        throw OverflowError(msg.str(), n);
      }
      est.overflow_count = 1;
      est.first_overflow_step = n;
      est.value = std::numeric_limits<double>::quiet_NaN();
      est.std_error = std::numeric_limits<double>::quiet_NaN();
      est.sample_variance = std::numeric_limits<double>::quiet_NaN();
      est.phi_avg = std::numeric_limits<double>::quiet_NaN();
      est.phi_std_error = std::numeric_limits<double>::quiet_NaN();
      est.n_samples = n >= nw ? n - nw : 0;
      break;
    }
  }

  const auto count = static_cast<double>(options.steps);
  const auto per_batch = static_cast<double>(batch);
  if (est.overflow_count == 0) {
    const double phi_avg = sum_phi.value() / count;
    // sum (phi - avg) s2 = sum phi s2 - avg sum s2
    est.value =
        (sum_s1.value() + sum_phi_s2.value() - phi_avg * sum_s2.value()) / count;
    std::vector<double> batch_values, batch_phis;
    for (const auto& b : batches) {
      batch_values.push_back(
          (b.s1.value() + b.phi_s2.value() - phi_avg * b.s2.value()) / per_batch);
      batch_phis.push_back(b.phi.value() / per_batch);
    }
    const Summary s = summarize(batch_values);
    est.std_error = s.std_error;
    est.sample_variance = s.variance;
    est.phi_avg = phi_avg;
    est.phi_std_error = summarize(batch_phis).std_error;
    est.n_samples = options.steps;
  }

  est.metadata = {{"estimator", "path_kernel_ergodic"},
                  {"model", model.describe()},
                  {"observable", observable.name()},
                  {"param", to_string(point.id)},
                  {"gamma", point.gamma},
                  {"dt", options.dt},
                  {"steps", options.steps},
                  {"horizon", options.dt * count},
                  {"window_steps", nw},
                  {"window", options.dt * static_cast<double>(nw)},
                  {"spinup_steps", options.spinup},
                  {"batch_length", batch},
                  {"seed", options.seed},
                  {"path_index", options.path_index},
                  {"schedule", schedule.describe()},
                  {"std_error_method", "batch_means"},
                  {"std_error_note",
                   "ergodic error bars are an addition of this implementation"}};
  return est;
}

ObservableAverage observable_average(const SdeModel& model,
                                     const Observable& observable,
                                     double gamma,
                                     const ErgodicOptions& options) {
  // A trailing partial batch only drops out of the error bar.
  const std::size_t batch = options.batch_length != 0
                                ? options.batch_length
                                : std::max<std::size_t>(1, options.steps / 20);
  if (options.steps / batch < 2)
    throw ConfigError("observable average needs at least two batches");
  RngStream stream(options.seed, options.path_index);
  Stepper stepper(model, ParamPoint{gamma, model.param()}, options.dt);
  State x = start_state(model, gamma, options);
  std::vector<double> db(model.dim());
  for (std::size_t n = 0; n < options.spinup; ++n) {
    stream.gaussian_increment(options.dt, db);
    stepper.advance_state(x, db);
  }
  if (!is_finite(x)) throw OverflowError("state overflowed during spin-up", 0);

  std::vector<double> batch_means;
  CompensatedSum total;
  CompensatedSum current;
  for (std::size_t n = 0; n < options.steps; ++n) {
    const double phi = observable.value(x);
    total.add(phi);
    current.add(phi);
    if ((n + 1) % batch == 0) {
      batch_means.push_back(current.value() / static_cast<double>(batch));
      current = CompensatedSum{};
    }
    stream.gaussian_increment(options.dt, db);
    stepper.advance_state(x, db);
    if (!is_finite(x)) throw OverflowError("state overflowed", n);
  }
  const Summary s = summarize(batch_means);
  return {total.value() / static_cast<double>(options.steps), s.std_error,
          options.steps};
}

}  // namespace pathkernel
