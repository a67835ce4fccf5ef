#include "pathkernel/models.hpp"

#include <algorithm>
#include <cmath>

#include "pathkernel/errors.hpp"

namespace pathkernel {

// ---------------------------------------------------------------- Lorenz 96

Lorenz96Model::Lorenz96Model(Param param, std::size_t dim, double sigma0)
    : param_(param), dim_(dim), sigma0_(sigma0) {
  if (dim_ < 4) throw ConfigError("lorenz96 needs dimension >= 4");
  if (!(sigma0_ >= 0.0) || !std::isfinite(sigma0_))
    throw ConfigError("lorenz96 sigma0 must be finite and >= 0");
}

void Lorenz96Model::drift(std::span<const double> x, double gamma,
                          std::span<double> out) const {
  const double forcing = 8.0 + (param_ == Param::drift ? gamma : 0.0);
  const std::size_t m = dim_;
  for (std::size_t i = 0; i < m; ++i) {
    const double xp1 = x[(i + 1) % m];
    const double xm1 = x[(i + m - 1) % m];
    const double xm2 = x[(i + m - 2) % m];
    out[i] = (xp1 - xm2) * xm1 - x[i] + forcing - 0.01 * x[i] * x[i];
  }
}

double Lorenz96Model::diffusion(std::span<const double>, double gamma) const {
  return (1.0 + (param_ == Param::diffusion ? gamma : 0.0)) * sigma0_;
}

void Lorenz96Model::drift_jvp(std::span<const double> x, double,
                              std::span<const double> v,
                              std::span<double> out) const {
  const std::size_t m = dim_;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t ip1 = (i + 1) % m;
    const std::size_t im1 = (i + m - 1) % m;
    const std::size_t im2 = (i + m - 2) % m;
    out[i] = (v[ip1] - v[im2]) * x[im1] + (x[ip1] - x[im2]) * v[im1] - v[i] -
             0.02 * x[i] * v[i];
  }
}

void Lorenz96Model::drift_dgamma(std::span<const double>, double,
                                 std::span<double> out) const {
  std::fill(out.begin(), out.end(), param_ == Param::drift ? 1.0 : 0.0);
}

double Lorenz96Model::diffusion_grad_dot(std::span<const double>, double,
                                         std::span<const double>) const {
  return 0.0;
}

double Lorenz96Model::diffusion_dgamma(std::span<const double>, double) const {
  return param_ == Param::diffusion ? sigma0_ : 0.0;
}

State Lorenz96Model::initial_state(double gamma) const {
  return State(dim_, param_ == Param::initial ? gamma : 0.0);
}

TangentVector Lorenz96Model::initial_tangent() const {
  return TangentVector(dim_, param_ == Param::initial ? 1.0 : 0.0);
}

nlohmann::json Lorenz96Model::describe() const {
  return {{"name", name()},
          {"param", to_string(param_)},
          {"dim", dim_},
          {"sigma0", sigma0_}};
}

// ---------------------------------------------------------------- OU

OuModel::OuModel(Param param, double rate, double sigma, std::size_t dim,
                 double x0)
    : param_(param), rate_(rate), sigma_(sigma), dim_(dim), x0_(x0) {
  if (!(rate_ > 0.0)) throw ConfigError("ou rate must be positive");
  if (!(sigma_ > 0.0)) throw ConfigError("ou sigma must be positive");
  if (dim_ < 1) throw ConfigError("ou dimension must be >= 1");
}

void OuModel::drift(std::span<const double> x, double gamma,
                    std::span<double> out) const {
  const double shift = param_ == Param::drift ? gamma : 0.0;
  for (std::size_t i = 0; i < dim_; ++i) out[i] = -rate_ * x[i] + shift;
}

double OuModel::diffusion(std::span<const double>, double gamma) const {
  return (1.0 + (param_ == Param::diffusion ? gamma : 0.0)) * sigma_;
}

void OuModel::drift_jvp(std::span<const double>, double,
                        std::span<const double> v,
                        std::span<double> out) const {
  for (std::size_t i = 0; i < dim_; ++i) out[i] = -rate_ * v[i];
}

void OuModel::drift_dgamma(std::span<const double>, double,
                           std::span<double> out) const {
  std::fill(out.begin(), out.end(), param_ == Param::drift ? 1.0 : 0.0);
}

double OuModel::diffusion_grad_dot(std::span<const double>, double,
                                   std::span<const double>) const {
  return 0.0;
}

double OuModel::diffusion_dgamma(std::span<const double>, double) const {
  return param_ == Param::diffusion ? sigma_ : 0.0;
}

State OuModel::initial_state(double gamma) const {
  return State(dim_, x0_ + (param_ == Param::initial ? gamma : 0.0));
}

TangentVector OuModel::initial_tangent() const {
  return TangentVector(dim_, param_ == Param::initial ? 1.0 : 0.0);
}

nlohmann::json OuModel::describe() const {
  return {{"name", name()}, {"param", to_string(param_)}, {"dim", dim_},
          {"rate", rate_},  {"sigma", sigma_},              {"x0", x0_}};
}

// ---------------------------------------------------------------- Gauss

GaussModel::GaussModel(Param param, std::size_t dim)
    : param_(param), dim_(dim) {
  if (param_ == Param::drift)
    throw ConfigError("gauss model has no drift parameter");
  if (dim_ < 1) throw ConfigError("gauss dimension must be >= 1");
}

void GaussModel::drift(std::span<const double>, double,
                       std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

double GaussModel::diffusion(std::span<const double>, double gamma) const {
  return param_ == Param::diffusion ? 1.0 + gamma : 1.0;
}

void GaussModel::drift_jvp(std::span<const double>, double,
                           std::span<const double>,
                           std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

void GaussModel::drift_dgamma(std::span<const double>, double,
                              std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

double GaussModel::diffusion_grad_dot(std::span<const double>, double,
                                      std::span<const double>) const {
  return 0.0;
}

double GaussModel::diffusion_dgamma(std::span<const double>, double) const {
  return param_ == Param::diffusion ? 1.0 : 0.0;
}

State GaussModel::initial_state(double gamma) const {
  return State(dim_, param_ == Param::initial ? gamma : 0.0);
}

TangentVector GaussModel::initial_tangent() const {
  return TangentVector(dim_, param_ == Param::initial ? 1.0 : 0.0);
}

nlohmann::json GaussModel::describe() const {
  return {{"name", name()}, {"param", to_string(param_)}, {"dim", dim_}};
}

// ---------------------------------------------------------------- observables

double MeanObservable::value(std::span<const double> x) const {
  double s = 0.0;
  for (double xi : x) s += xi;
  return s / static_cast<double>(x.size());
}

void MeanObservable::gradient(std::span<const double> x,
                              std::span<double> out) const {
  std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(x.size()));
}

double SquareObservable::value(std::span<const double> x) const {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return s / static_cast<double>(x.size());
}

void SquareObservable::gradient(std::span<const double> x,
                                std::span<double> out) const {
  const double scale = 2.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * x[i];
}

std::string ShiftedObservable::name() const {
  return base_->name() + "+" + std::to_string(shift_);
}

}  // namespace pathkernel
