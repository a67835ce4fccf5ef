#pragma once

// Independent references for the estimators: central finite differences in
// gamma, closed-form derivatives for the solvable models, and the top
// Lyapunov exponent used to pick a constant schedule.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathkernel/estimators.hpp"
#include "pathkernel/model.hpp"

namespace pathkernel {

enum class Coupling { common_seed, independent };

std::string to_string(Coupling c);

struct FdOracleConfig {
  double h = 0.05;
  Coupling coupling = Coupling::common_seed;
  /// Independent orbits per side (ergodic oracle).
  std::size_t replications = 4;
  unsigned workers = 1;
};

/// (E[Phi(X_T)] at g + h  -  at g - h) / 2h over L paths. With common-seed
/// coupling both sides reuse the same increment addresses path by path.
SensitivityEstimate fd_derivative_finite_time(const SdeModel& model,
                                              const Observable& observable,
                                              double gamma, double dt,
                                              std::size_t steps,
                                              std::size_t paths,
                                              std::uint64_t seed,
                                              const FdOracleConfig& cfg = {});

/// Same with long-run time averages; each replication is an independent
/// orbit of `steps` steps after `spinup` steps. Errors from the spread of
/// the per-replication differences.
SensitivityEstimate fd_derivative_ergodic(const SdeModel& model,
                                          const Observable& observable,
                                          double gamma, double dt,
                                          std::size_t steps,
                                          std::size_t spinup,
                                          std::uint64_t seed,
                                          FdOracleConfig cfg = {
                                              0.05, Coupling::independent, 4, 1});

struct LyapunovResult {
  double exponent = 0.0;
  /// Running estimate after each renormalization.
  std::vector<double> times;
  std::vector<double> trace;
};

/// Top Lyapunov exponent from a single renormalized tangent of
///   du = grad_u F(X) dt + (dsigma(X) . u) dB.
LyapunovResult top_lyapunov(const SdeModel& model, double gamma, double dt,
                            std::size_t steps, std::uint64_t seed,
                            std::size_t renorm_interval,
                            std::size_t spinup = 0);

struct AnalyticQuery {
  std::string model;
  std::string observable;
  Param param = Param::drift;
  /// Horizon for finite-time queries; nullopt asks for the stationary value.
  std::optional<double> horizon;
  double gamma = 0.0;
  double rate = 1.0;   // ou
  double sigma = 1.0;  // ou
  double x0 = 0.0;     // ou
};

/// Closed-form derivative when one exists, nullopt ("unavailable") otherwise.
std::optional<double> analytic_reference(const AnalyticQuery& query);

}  // namespace pathkernel
