#pragma once

// Built-in models: noisy Lorenz 96 and two analytically solvable references
// (Ornstein-Uhlenbeck and the drift-free Gaussian).

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "pathkernel/model.hpp"

namespace pathkernel {

/// dX^i = ((X^{i+1} - X^{i-2}) X^{i-1} - X^i + 8 + g0 - 0.01 (X^i)^2) dt
///        + (1 + g1) sigma0 dB^i,          X_0 = g2 [1, ..., 1]
/// with cyclic indices. Exactly one of g0/g1/g2 is active (`param`).
class Lorenz96Model final : public SdeModel {
 public:
  explicit Lorenz96Model(Param param, std::size_t dim = 40,
                         double sigma0 = 0.5);

  std::string name() const override { return "lorenz96"; }
  std::size_t dim() const override { return dim_; }
  Param param() const override { return param_; }
  double sigma0() const noexcept { return sigma0_; }

  void drift(std::span<const double> x, double gamma,
             std::span<double> out) const override;
  double diffusion(std::span<const double> x, double gamma) const override;
  void drift_jvp(std::span<const double> x, double gamma,
                 std::span<const double> v,
                 std::span<double> out) const override;
  void drift_dgamma(std::span<const double> x, double gamma,
                    std::span<double> out) const override;
  double diffusion_grad_dot(std::span<const double> x, double gamma,
                            std::span<const double> v) const override;
  double diffusion_dgamma(std::span<const double> x,
                          double gamma) const override;
  State initial_state(double gamma) const override;
  TangentVector initial_tangent() const override;
  nlohmann::json describe() const override;

 private:
  Param param_;
  std::size_t dim_;
  double sigma0_;
};

/// Independent coordinates dX = (-a X + s) dt + sigma_eff dB, X_0 = x0 + i.
/// drift: s = g; diffusion: sigma_eff = (1 + g) sigma; initial: i = g.
class OuModel final : public SdeModel {
 public:
  explicit OuModel(Param param, double rate = 1.0, double sigma = 1.0,
                   std::size_t dim = 1, double x0 = 0.0);

  std::string name() const override { return "ou"; }
  std::size_t dim() const override { return dim_; }
  Param param() const override { return param_; }
  double rate() const noexcept { return rate_; }
  double sigma() const noexcept { return sigma_; }

  void drift(std::span<const double> x, double gamma,
             std::span<double> out) const override;
  double diffusion(std::span<const double> x, double gamma) const override;
  void drift_jvp(std::span<const double> x, double gamma,
                 std::span<const double> v,
                 std::span<double> out) const override;
  void drift_dgamma(std::span<const double> x, double gamma,
                    std::span<double> out) const override;
  double diffusion_grad_dot(std::span<const double> x, double gamma,
                            std::span<const double> v) const override;
  double diffusion_dgamma(std::span<const double> x,
                          double gamma) const override;
  State initial_state(double gamma) const override;
  TangentVector initial_tangent() const override;
  nlohmann::json describe() const override;

 private:
  Param param_;
  double rate_;
  double sigma_;
  std::size_t dim_;
  double x0_;
};

/// F = 0. diffusion: sigma = 1 + g, X_0 = 0 (so X_T = (1 + g) B_T);
/// initial: sigma = 1, X_0 = g [1, ..., 1].
class GaussModel final : public SdeModel {
 public:
  explicit GaussModel(Param param = Param::diffusion, std::size_t dim = 1);

  std::string name() const override { return "gauss"; }
  std::size_t dim() const override { return dim_; }
  Param param() const override { return param_; }

  void drift(std::span<const double> x, double gamma,
             std::span<double> out) const override;
  double diffusion(std::span<const double> x, double gamma) const override;
  void drift_jvp(std::span<const double> x, double gamma,
                 std::span<const double> v,
                 std::span<double> out) const override;
  void drift_dgamma(std::span<const double> x, double gamma,
                    std::span<double> out) const override;
  double diffusion_grad_dot(std::span<const double> x, double gamma,
                            std::span<const double> v) const override;
  double diffusion_dgamma(std::span<const double> x,
                          double gamma) const override;
  State initial_state(double gamma) const override;
  TangentVector initial_tangent() const override;
  nlohmann::json describe() const override;

 private:
  Param param_;
  std::size_t dim_;
};

/// Phi(x) = (1/M) sum_i x^i.
class MeanObservable final : public Observable {
 public:
  std::string name() const override { return "mean"; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x,
                std::span<double> out) const override;
};

/// Phi(x) = (1/M) sum_i (x^i)^2; x^2 for scalar models.
class SquareObservable final : public Observable {
 public:
  std::string name() const override { return "square"; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x,
                std::span<double> out) const override;
};

/// Phi + c.
class ShiftedObservable final : public Observable {
 public:
  ShiftedObservable(std::shared_ptr<const Observable> base, double shift)
      : base_(std::move(base)), shift_(shift) {}

  std::string name() const override;
  double value(std::span<const double> x) const override {
    return base_->value(x) + shift_;
  }
  void gradient(std::span<const double> x,
                std::span<double> out) const override {
    base_->gradient(x, out);
  }

 private:
  std::shared_ptr<const Observable> base_;
  double shift_;
};

}  // namespace pathkernel
