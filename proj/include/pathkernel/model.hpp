#pragma once

// Abstract SDE model and observable interfaces.
//
// All SDEs are Ito with a scalar diffusion field times the identity:
//
//   dX = F^g(X) dt + sigma^g(X) dB,   X_0 = x_0 + g v_0.
//
// The "derivative" capabilities (drift_jvp, drift_dgamma, ...) are evaluated
// at the base parameter value of the run, which need not be zero.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace pathkernel {

using State = std::vector<double>;
using TangentVector = std::vector<double>;

/// Which scalar parameter of a model is being differentiated.
enum class Param { drift, diffusion, initial };

std::string to_string(Param p);
Param param_from_string(const std::string& name);

struct ParamPoint {
  double gamma = 0.0;
  Param id = Param::drift;
};

class SdeModel {
 public:
  virtual ~SdeModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  /// The parameter this instance differentiates.
  virtual Param param() const = 0;

  virtual void drift(std::span<const double> x, double gamma,
                     std::span<double> out) const = 0;
  virtual double diffusion(std::span<const double> x, double gamma) const = 0;

  /// Directional derivative of the drift along v, at x.
  virtual void drift_jvp(std::span<const double> x, double gamma,
                         std::span<const double> v,
                         std::span<double> out) const = 0;
  virtual void drift_dgamma(std::span<const double> x, double gamma,
                            std::span<double> out) const = 0;
  /// d sigma(x) . v
  virtual double diffusion_grad_dot(std::span<const double> x, double gamma,
                                    std::span<const double> v) const = 0;
  virtual double diffusion_dgamma(std::span<const double> x,
                                  double gamma) const = 0;

  virtual State initial_state(double gamma) const = 0;
  virtual TangentVector initial_tangent() const = 0;

  /// Constructor parameters, echoed into output metadata.
  virtual nlohmann::json describe() const = 0;
};

class Observable {
 public:
  virtual ~Observable() = default;

  virtual std::string name() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x,
                        std::span<double> out) const = 0;
};

struct ValidationEntry {
  std::size_t probe = 0;
  std::string check;  // "drift_jvp", "diffusion_grad_dot", "drift_dgamma", "diffusion_dgamma"
  double max_rel_error = 0.0;
  bool passed = true;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  double tolerance = 0.0;

  bool ok() const;
  /// Largest relative error of the named check over all probes.
  double max_error(const std::string& check) const;
  std::vector<ValidationEntry> failures() const;
};

struct ValidationOptions {
  double fd_step = 1e-5;
  double tolerance = 1e-5;
  /// Probe directions; empty means {normalized ones, e_0}.
  std::vector<TangentVector> directions;
};

/// Compares every closed-form derivative capability of `model` against
/// central finite differences at each probe state. Failures are reported per
/// probe, never thrown.
ValidationReport validate_model(const SdeModel& model,
                                const std::vector<State>& probe_states,
                                const ParamPoint& point,
                                const ValidationOptions& options = {});

/// Throws ConfigError unless initial_state(g) - initial_state(0) equals
/// g * initial_tangent() for a handful of g.
void check_affine_initial_condition(const SdeModel& model);

}  // namespace pathkernel
