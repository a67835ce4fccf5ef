#include "pathkernel/integrator.hpp"

#include <cmath>
#include <sstream>

#include "pathkernel/errors.hpp"

namespace pathkernel {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double checked_diffusion(const SdeModel& model, std::span<const double> x,
                         double gamma) {
  const double sigma = model.diffusion(x, gamma);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    std::ostringstream msg;
    msg << "degenerate diffusion: sigma = " << sigma << " for model "
        << model.name();
    throw DegenerateDiffusionError(msg.str());
  }
  return sigma;
}

void check_increment(const SdeModel& model, std::span<const double> db) {
  if (db.size() != model.dim())
    throw ConfigError("increment dimension does not match the model");
}

}  // namespace

bool is_finite(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

double norm2(std::span<const double> values) {
  return std::sqrt(dot(values, values));
}

Stepper::Stepper(const SdeModel& model, const ParamPoint& point, double dt)
    : model_(model),
      point_(point),
      dt_(dt),
      drift_(model.dim()),
      jvp_(model.dim()),
      dgamma_(model.dim()) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("time step must be positive");
}

double Stepper::advance(std::span<double> x, std::span<double> v, double alpha,
                        std::span<const double> db) {
  const double g = point_.gamma;
  const double sigma = checked_diffusion(model_, x, g);
  const double increment = (dot(db, v) * alpha) / sigma;

  model_.drift(x, g, drift_);
  model_.drift_jvp(x, g, v, jvp_);
  model_.drift_dgamma(x, g, dgamma_);
  const double noise_coeff =
      model_.diffusion_grad_dot(x, g, v) + model_.diffusion_dgamma(x, g);
  const double damping = alpha * dt_;

  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = x[i] + drift_[i] * dt_ + sigma * db[i];
    v[i] = v[i] - damping * v[i] + (jvp_[i] + dgamma_[i]) * dt_ +
           noise_coeff * db[i];
  }
  return increment;
}

void Stepper::advance_state(std::span<double> x, std::span<const double> db) {
  const double g = point_.gamma;
  const double sigma = model_.diffusion(x, g);
  model_.drift(x, g, drift_);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = x[i] + drift_[i] * dt_ + sigma * db[i];
}

State euler_step(const SdeModel& model, std::span<const double> x,
                 const ParamPoint& point, double dt,
                 std::span<const double> db) {
  if (!(dt > 0.0)) throw ConfigError("euler_step: dt must be positive");
  check_increment(model, db);
  Stepper stepper(model, point, dt);
  State next(x.begin(), x.end());
  stepper.advance_state(next, db);
  return next;
}

TangentVector tangent_step(const SdeModel& model, std::span<const double> x,
                           std::span<const double> v, const ParamPoint& point,
                           double alpha, double dt,
                           std::span<const double> db) {
  return full_step(model, x, v, point, alpha, dt, db).v_next;
}

double kernel_increment(const SdeModel& model, std::span<const double> x,
                        std::span<const double> v, const ParamPoint& point,
                        double alpha, std::span<const double> db) {
  check_increment(model, db);
  const double sigma = checked_diffusion(model, x, point.gamma);
  return (dot(db, v) * alpha) / sigma;
}

StepRecord full_step(const SdeModel& model, std::span<const double> x,
                     std::span<const double> v, const ParamPoint& point,
                     double alpha, double dt, std::span<const double> db) {
  check_increment(model, db);
  Stepper stepper(model, point, dt);
  StepRecord record{State(x.begin(), x.end()), TangentVector(v.begin(), v.end()),
                    0.0};
  record.kernel_increment =
      stepper.advance(record.x_next, record.v_next, alpha, db);
  return record;
}

PathAccumulators simulate_path(const SdeModel& model,
                               const Observable& observable,
                               const Schedule& schedule,
                               const ParamPoint& point, double dt,
                               std::size_t steps, RngStream& stream) {
  if (steps < 1) throw ConfigError("simulate_path: need at least one step");
  const std::size_t m = model.dim();
  State x = model.initial_state(point.gamma);
  TangentVector v = model.initial_tangent();
  std::vector<double> db(m);
  Stepper stepper(model, point, dt);

  PathAccumulators acc;
  acc.max_tangent_norm = norm2(v);
  for (std::size_t n = 0; n < steps; ++n) {
    stream.gaussian_increment(dt, db);
    const double alpha = schedule.alpha(HistoryView{n, dt, x});
    acc.s2 += stepper.advance(x, v, alpha, db);

    const double vnorm = norm2(v);
    if (vnorm > acc.max_tangent_norm) acc.max_tangent_norm = vnorm;
    if (!is_finite(x) || !std::isfinite(vnorm) || vnorm > kTangentOverflow ||
        !std::isfinite(acc.s2)) {
      acc.overflowed = true;
      acc.overflow_step = n;
      return acc;
    }
  }
  acc.phi = observable.value(x);
  std::vector<double> grad(m);
  observable.gradient(x, grad);
  acc.s1 = dot(grad, v);
  return acc;
}

std::optional<double> simulate_observable(const SdeModel& model,
                                          const Observable& observable,
                                          double gamma, double dt,
                                          std::size_t steps,
                                          RngStream& stream) {
  State x = model.initial_state(gamma);
  std::vector<double> db(model.dim());
  Stepper stepper(model, ParamPoint{gamma, model.param()}, dt);
  for (std::size_t n = 0; n < steps; ++n) {
    stream.gaussian_increment(dt, db);
    stepper.advance_state(x, db);
    if (!is_finite(x)) return std::nullopt;
  }
  return observable.value(x);
}

}  // namespace pathkernel
