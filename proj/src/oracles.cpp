#include "pathkernel/oracles.hpp"

#include <cmath>
#include <sstream>

#include "pathkernel/errors.hpp"
#include "pathkernel/integrator.hpp"
#include "pathkernel/parallel.hpp"
#include "pathkernel/rng.hpp"
#include "pathkernel/stats.hpp"

namespace pathkernel {

std::string to_string(Coupling c) {
  return c == Coupling::common_seed ? "common_seed" : "independent";
}

namespace {

std::uint64_t minus_side_seed(std::uint64_t seed, Coupling coupling) {
  return coupling == Coupling::common_seed ? seed : derive_seed(seed, 1);
}

void check_h(const FdOracleConfig& cfg) {
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h))
    throw ConfigError("finite-difference step h must be positive");
}

}  // namespace

SensitivityEstimate fd_derivative_finite_time(const SdeModel& model,
                                              const Observable& observable,
                                              double gamma, double dt,
                                              std::size_t steps,
                                              std::size_t paths,
                                              std::uint64_t seed,
                                              const FdOracleConfig& cfg) {
  check_h(cfg);
  if (paths < 2) throw ConfigError("need at least two sample paths");
  if (steps < 1) throw ConfigError("need at least one time step");
  const std::uint64_t seed_minus = minus_side_seed(seed, cfg.coupling);

  std::vector<double> diffs(paths), centers(paths);
  std::vector<char> overflowed(paths, 0);
  parallel_for(paths, cfg.workers, [&](std::size_t l) {
    RngStream up(seed, l);
    RngStream down(seed_minus, l);
    const auto plus =
        simulate_observable(model, observable, gamma + cfg.h, dt, steps, up);
    const auto minus =
        simulate_observable(model, observable, gamma - cfg.h, dt, steps, down);
    if (!plus || !minus) {
      overflowed[l] = 1;
      return;
    }
    diffs[l] = (*plus - *minus) / (2.0 * cfg.h);
    centers[l] = 0.5 * (*plus + *minus);
  });
  for (std::size_t l = 0; l < paths; ++l)
    if (overflowed[l])
      throw OverflowError("finite-difference oracle: path " + std::to_string(l) +
                              " overflowed at gamma +- h",
                          0);

  const Summary d = summarize(diffs);
  const Summary c = summarize(centers);
  SensitivityEstimate est;
  est.value = d.mean;
  est.std_error = d.std_error;
  est.sample_variance = d.variance;
  est.phi_avg = c.mean;
  est.phi_std_error = c.std_error;
  est.n_samples = paths;
  est.metadata = {{"estimator", "fd_finite_time"},
                  {"tag", "oracle"},
                  {"model", model.describe()},
                  {"observable", observable.name()},
                  {"param", to_string(model.param())},
                  {"gamma", gamma},
                  {"dt", dt},
                  {"steps", steps},
                  {"horizon", dt * static_cast<double>(steps)},
                  {"paths", paths},
                  {"seed", seed},
                  {"h", cfg.h},
                  {"coupling", to_string(cfg.coupling)},
                  {"std_error_method", "per_path"}};
  return est;
}

SensitivityEstimate fd_derivative_ergodic(const SdeModel& model,
                                          const Observable& observable,
                                          double gamma, double dt,
                                          std::size_t steps,
                                          std::size_t spinup,
                                          std::uint64_t seed,
                                          FdOracleConfig cfg) {
  check_h(cfg);
  if (cfg.replications < 2)
    throw ConfigError("ergodic oracle needs at least two replications");
  const std::size_t reps = cfg.replications;
  const std::uint64_t seed_minus = minus_side_seed(seed, cfg.coupling);

  std::vector<double> averages(2 * reps);
  parallel_for(2 * reps, cfg.workers, [&](std::size_t task) {
    const std::size_t r = task / 2;
    const bool plus_side = task % 2 == 0;
    ErgodicOptions o;
    o.dt = dt;
    o.steps = steps;
    o.spinup = spinup;
    o.window = 1;
    o.seed = plus_side ? seed : seed_minus;
    o.path_index = r;
    averages[task] = observable_average(
        model, observable, plus_side ? gamma + cfg.h : gamma - cfg.h, o).mean;
  });

  std::vector<double> diffs(reps), centers(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    diffs[r] = (averages[2 * r] - averages[2 * r + 1]) / (2.0 * cfg.h);
    centers[r] = 0.5 * (averages[2 * r] + averages[2 * r + 1]);
  }
  const Summary d = summarize(diffs);
  const Summary c = summarize(centers);
  SensitivityEstimate est;
  est.value = d.mean;
  est.std_error = d.std_error;
  est.sample_variance = d.variance;
  est.phi_avg = c.mean;
  est.phi_std_error = c.std_error;
  est.n_samples = reps * steps;
  est.metadata = {{"estimator", "fd_ergodic"},
                  {"tag", "oracle"},
                  {"model", model.describe()},
                  {"observable", observable.name()},
                  {"param", to_string(model.param())},
                  {"gamma", gamma},
                  {"dt", dt},
                  {"steps", steps},
                  {"horizon", dt * static_cast<double>(steps)},
                  {"spinup_steps", spinup},
                  {"replications", reps},
                  {"seed", seed},
                  {"h", cfg.h},
                  {"coupling", to_string(cfg.coupling)},
                  {"std_error_method", "replications"}};
  return est;
}

LyapunovResult top_lyapunov(const SdeModel& model, double gamma, double dt,
                            std::size_t steps, std::uint64_t seed,
                            std::size_t renorm_interval, std::size_t spinup) {
  if (!(dt > 0.0)) throw ConfigError("top_lyapunov: dt must be positive");
  if (steps < 1) throw ConfigError("top_lyapunov: need at least one step");
  if (renorm_interval < 1)
    throw ConfigError("top_lyapunov: renormalization interval must be >= 1");

  const std::size_t m = model.dim();
  RngStream stream(seed, 0);
  Stepper stepper(model, ParamPoint{gamma, model.param()}, dt);
  State x = model.initial_state(gamma);
  std::vector<double> db(m), jvp(m);
  for (std::size_t n = 0; n < spinup; ++n) {
    stream.gaussian_increment(dt, db);
    stepper.advance_state(x, db);
  }

  TangentVector u(m, 1.0 / std::sqrt(static_cast<double>(m)));
  LyapunovResult result;
  double log_growth = 0.0;
  auto renormalize = [&](std::size_t done) {
    const double norm = norm2(u);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      std::ostringstream msg;
      msg << "top_lyapunov: tangent collapsed (|u| = " << norm << ") at step "
          << done;
      throw Error(msg.str());
    }
    log_growth += std::log(norm);
    for (double& ui : u) ui /= norm;
    const double t = static_cast<double>(done) * dt;
    result.times.push_back(t);
    result.trace.push_back(log_growth / t);
  };

  for (std::size_t n = 0; n < steps; ++n) {
    stream.gaussian_increment(dt, db);
    model.drift_jvp(x, gamma, u, jvp);
    const double noise = model.diffusion_grad_dot(x, gamma, u);
    for (std::size_t i = 0; i < m; ++i) u[i] += jvp[i] * dt + noise * db[i];
    stepper.advance_state(x, db);
    if ((n + 1) % renorm_interval == 0 || n + 1 == steps) renormalize(n + 1);
  }
  result.exponent = log_growth / (static_cast<double>(steps) * dt);
  return result;
}

std::optional<double> analytic_reference(const AnalyticQuery& q) {
  const bool mean = q.observable == "mean" || q.observable == "x";
  const bool square = q.observable == "square" || q.observable == "x2";
  if (!mean && !square) return std::nullopt;
  const double g = q.gamma;

  if (q.model == "gauss") {
    if (!q.horizon) return std::nullopt;  // no stationary law
    const double t = *q.horizon;
    if (q.param == Param::diffusion) return mean ? 0.0 : 2.0 * (1.0 + g) * t;
    if (q.param == Param::initial) return mean ? 1.0 : 2.0 * g;
    return std::nullopt;
  }

  if (q.model == "ou") {
    const double a = q.rate;
    const double s2 = q.sigma * q.sigma;
    if (!q.horizon) {
      switch (q.param) {
        case Param::drift:
          return mean ? 1.0 / a : 2.0 * g / (a * a);
        case Param::diffusion:
          return mean ? 0.0 : (1.0 + g) * s2 / a;
        case Param::initial:
          return 0.0;
      }
    }
    const double decay = std::exp(-a * *q.horizon);
    switch (q.param) {
      case Param::drift: {
        const double dm = (1.0 - decay) / a;
        const double m = q.x0 * decay + g * dm;
        return mean ? dm : 2.0 * m * dm;
      }
      case Param::diffusion:
        return mean ? 0.0 : (1.0 + g) * s2 * (1.0 - decay * decay) / a;
      case Param::initial: {
        const double m = (q.x0 + g) * decay;
        return mean ? decay : 2.0 * m * decay;
      }
    }
  }
  return std::nullopt;
}

}  // namespace pathkernel
