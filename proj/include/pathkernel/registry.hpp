#pragma once

// Name-based lookup of models and observables for the command line.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pathkernel/model.hpp"

namespace pathkernel {

/// Model knobs settable from the command line or a config file. Each model
/// reads only the fields that apply to it.
struct ModelParams {
  std::size_t dim = 0;     // 0: model default (40 for lorenz96, 1 otherwise)
  double sigma0 = 0.5;     // lorenz96 base noise
  double rate = 1.0;       // ou mean-reversion rate
  double sigma = 1.0;      // ou base noise
  double x0 = 0.0;         // ou base initial condition
};

using ModelFactory =
    std::function<std::unique_ptr<SdeModel>(Param, const ModelParams&)>;

/// Adds a model under `name`. The factory is probed once per parameter
/// flavor it accepts and rejected unless the initial condition is affine in
/// gamma.
void register_model(const std::string& name, ModelFactory factory);

/// Throws ConfigError for unknown names or unsupported parameter flavors.
std::unique_ptr<SdeModel> make_model(const std::string& name, Param param,
                                     const ModelParams& params = {});
std::vector<std::string> model_names();

/// "mean" (alias "x") and "square" (alias "x2").
std::shared_ptr<const Observable> make_observable(const std::string& name);

}  // namespace pathkernel
