#pragma once

// Path-kernel estimators: finite horizon over independent paths, and the
// ergodic single-orbit version with a decorrelation window.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "pathkernel/integrator.hpp"
#include "pathkernel/model.hpp"
#include "pathkernel/schedule.hpp"

namespace pathkernel {

struct SensitivityEstimate {
  double value = 0.0;      // estimated derivative of E[Phi]
  double std_error = 0.0;
  /// Per-sample variance of the summand (per path, or per batch mean).
  double sample_variance = 0.0;
  double phi_avg = 0.0;
  double phi_std_error = 0.0;
  std::size_t n_samples = 0;  // paths, or orbit steps
  std::size_t overflow_count = 0;
  std::optional<std::uint64_t> first_overflow_step;
  double max_tangent_norm = 0.0;
  nlohmann::json metadata;
};

nlohmann::json to_json(const SensitivityEstimate& estimate);

struct FiniteTimeOptions {
  double dt = 0.01;
  std::size_t steps = 100;  // N, horizon T = N dt
  std::size_t paths = 1000; // L
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Drop overflowed paths instead of aborting.
  bool tolerate_overflow = false;
};

/// Centralized finite-horizon estimator:
///   value = (1/L) sum_l [ S1_l + (Phi_l - Phi_avg) S2_l ].
SensitivityEstimate estimate_finite_time(const SdeModel& model,
                                         const Observable& observable,
                                         const Schedule& schedule,
                                         const ParamPoint& point,
                                         const FiniteTimeOptions& options);

/// Raw per-path accumulators in path order; exposed for identity checks.
std::vector<PathAccumulators> simulate_paths(const SdeModel& model,
                                             const Observable& observable,
                                             const Schedule& schedule,
                                             const ParamPoint& point,
                                             const FiniteTimeOptions& options);

struct ErgodicOptions {
  double dt = 0.01;
  std::size_t steps = 100000;   // N, orbit length T = N dt
  std::size_t window = 100;     // N_W
  std::size_t spinup = 1000;    // M_pre
  /// Batch length for batch-means errors; 0 means 10 * window.
  std::size_t batch_length = 0;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  /// Stop at the first overflow and report instead of throwing.
  bool tolerate_overflow = false;
  /// Orbit start before spin-up; empty means the model's initial state.
  State start;
};

/// Single-orbit estimator. After spin-up, for n in [N_W, N_W + N):
///   S1_n = dPhi(x_n) v_n,  S2_n = I_{n-N_W} + ... + I_{n-1}
/// and value = (1/N) sum_n [ S1_n + (Phi_n - Phi_avg) S2_n ].
SensitivityEstimate estimate_ergodic(const SdeModel& model,
                                     const Observable& observable,
                                     const Schedule& schedule,
                                     const ParamPoint& point,
                                     const ErgodicOptions& options);

struct ObservableAverage {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

/// Long-run time average of Phi along one orbit, errors via batch means.
/// Works for sigma == 0 (deterministic dynamics).
ObservableAverage observable_average(const SdeModel& model,
                                     const Observable& observable,
                                     double gamma, const ErgodicOptions& options);

}  // namespace pathkernel
