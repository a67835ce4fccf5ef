#include "pathkernel/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathkernel/errors.hpp"

namespace pathkernel {

std::string to_string(Param p) {
  switch (p) {
    case Param::drift:
      return "drift";
    case Param::diffusion:
      return "diffusion";
    case Param::initial:
      return "initial";
  }
  return "unknown";
}

Param param_from_string(const std::string& name) {
  if (name == "drift" || name == "g0" || name == "gamma0") return Param::drift;
  if (name == "diffusion" || name == "g1" || name == "gamma1")
    return Param::diffusion;
  if (name == "initial" || name == "g2" || name == "gamma2")
    return Param::initial;
  throw ConfigError("unknown parameter '" + name +
                    "' (expected drift|diffusion|initial or g0|g1|g2)");
}

bool ValidationReport::ok() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ValidationEntry& e) { return e.passed; });
}

double ValidationReport::max_error(const std::string& check) const {
  double worst = 0.0;
  for (const auto& e : entries)
    if (e.check == check) worst = std::max(worst, e.max_rel_error);
  return worst;
}

std::vector<ValidationEntry> ValidationReport::failures() const {
  std::vector<ValidationEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [](const ValidationEntry& e) { return !e.passed; });
  return out;
}

namespace {

// Non-finite comparisons count as infinitely wrong.
double rel_error(double analytic, double fd) {
  const double err = std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
  return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
}

std::vector<TangentVector> default_directions(std::size_t dim) {
  std::vector<TangentVector> dirs;
  dirs.emplace_back(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  TangentVector e0(dim, 0.0);
  e0[0] = 1.0;
  dirs.push_back(std::move(e0));
  return dirs;
}

}  // namespace

ValidationReport validate_model(const SdeModel& model,
                                const std::vector<State>& probe_states,
                                const ParamPoint& point,
                                const ValidationOptions& options) {
  if (probe_states.empty()) throw ConfigError("validate_model: no probe states");
  const std::size_t m = model.dim();
  const double h = options.fd_step;
  const double g = point.gamma;
  const auto directions =
      options.directions.empty() ? default_directions(m) : options.directions;

  ValidationReport report;
  report.tolerance = options.tolerance;

  std::vector<double> plus(m), minus(m), analytic(m), xp(m), xm(m);
  for (std::size_t p = 0; p < probe_states.size(); ++p) {
    const State& x = probe_states[p];
    if (x.size() != m) throw ConfigError("validate_model: probe dimension mismatch");

    double jvp_err = 0.0;
    double sgrad_err = 0.0;
    for (const auto& v : directions) {
      for (std::size_t i = 0; i < m; ++i) {
        xp[i] = x[i] + h * v[i];
        xm[i] = x[i] - h * v[i];
      }
      model.drift(xp, g, plus);
      model.drift(xm, g, minus);
      model.drift_jvp(x, g, v, analytic);
      for (std::size_t i = 0; i < m; ++i)
        jvp_err = std::max(jvp_err,
                           rel_error(analytic[i], (plus[i] - minus[i]) / (2 * h)));

      const double fd_sigma =
          (model.diffusion(xp, g) - model.diffusion(xm, g)) / (2 * h);
      sgrad_err = std::max(sgrad_err,
                           rel_error(model.diffusion_grad_dot(x, g, v), fd_sigma));
    }

    model.drift(x, g + h, plus);
    model.drift(x, g - h, minus);
    model.drift_dgamma(x, g, analytic);
    double dg_err = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      dg_err = std::max(dg_err,
                        rel_error(analytic[i], (plus[i] - minus[i]) / (2 * h)));

    const double fd_sdg =
        (model.diffusion(x, g + h) - model.diffusion(x, g - h)) / (2 * h);
    const double sdg_err = rel_error(model.diffusion_dgamma(x, g), fd_sdg);

    for (auto [name, err] : {std::pair{"drift_jvp", jvp_err},
                             std::pair{"diffusion_grad_dot", sgrad_err},
                             std::pair{"drift_dgamma", dg_err},
                             std::pair{"diffusion_dgamma", sdg_err}}) {
      report.entries.push_back(
          {p, name, err, err <= options.tolerance});
    }
  }
  return report;
}

void check_affine_initial_condition(const SdeModel& model) {
  const State base = model.initial_state(0.0);
  const TangentVector v0 = model.initial_tangent();
  if (base.size() != model.dim() || v0.size() != model.dim())
    throw ConfigError(model.name() + ": initial condition has wrong dimension");
  for (double g : {-0.5, 0.25, 1.0, 3.0}) {
    const State xg = model.initial_state(g);
    for (std::size_t i = 0; i < xg.size(); ++i) {
      const double expected = g * v0[i];
      const double got = xg[i] - base[i];
      const double scale = std::max({1.0, std::abs(xg[i]), std::abs(base[i])});
      if (std::abs(got - expected) > 1e-12 * scale)
        throw ConfigError(model.name() +
                          ": initial condition is not affine in gamma");
    }
  }
}

}  // namespace pathkernel
