#include "pathkernel/registry.hpp"

#include <map>
#include <mutex>

#include "pathkernel/errors.hpp"
#include "pathkernel/models.hpp"

namespace pathkernel {

namespace {

std::size_t dim_or(std::size_t dim, std::size_t fallback) {
  return dim == 0 ? fallback : dim;
}

struct Registry {
  std::mutex mutex;
  std::map<std::string, ModelFactory> factories;

  Registry() {
    factories["lorenz96"] = [](Param p, const ModelParams& mp) {
      return std::make_unique<Lorenz96Model>(p, dim_or(mp.dim, 40), mp.sigma0);
    };
    factories["ou"] = [](Param p, const ModelParams& mp) {
      return std::make_unique<OuModel>(p, mp.rate, mp.sigma, dim_or(mp.dim, 1),
                                       mp.x0);
    };
    factories["gauss"] = [](Param p, const ModelParams& mp) {
      return std::make_unique<GaussModel>(p, dim_or(mp.dim, 1));
    };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_model(const std::string& name, ModelFactory factory) {
  if (!factory) throw ConfigError("register_model: empty factory");
  bool any = false;
  for (Param p : {Param::drift, Param::diffusion, Param::initial}) {
    std::unique_ptr<SdeModel> probe;
    try {
      probe = factory(p, ModelParams{});
    } catch (const ConfigError&) {
      continue;  // flavor not offered by this model
    }
    check_affine_initial_condition(*probe);
    any = true;
  }
  if (!any) throw ConfigError("register_model: '" + name + "' builds no model");
  std::lock_guard lock(registry().mutex);
  registry().factories[name] = std::move(factory);
}

std::unique_ptr<SdeModel> make_model(const std::string& name, Param param,
                                     const ModelParams& params) {
  ModelFactory factory;
  {
    std::lock_guard lock(registry().mutex);
    auto it = registry().factories.find(name);
    if (it == registry().factories.end())
      throw ConfigError("unknown model '" + name + "'");
    factory = it->second;
  }
  auto model = factory(param, params);
  check_affine_initial_condition(*model);
  return model;
}

std::vector<std::string> model_names() {
  std::lock_guard lock(registry().mutex);
  std::vector<std::string> names;
  for (const auto& [name, _] : registry().factories) names.push_back(name);
  return names;
}

std::shared_ptr<const Observable> make_observable(const std::string& name) {
  if (name == "mean" || name == "x") return std::make_shared<MeanObservable>();
  if (name == "square" || name == "x2")
    return std::make_shared<SquareObservable>();
  throw ConfigError("unknown observable '" + name + "' (expected mean|x|square|x2)");
}

}  // namespace pathkernel
