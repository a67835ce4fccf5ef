#pragma once

// One Euler-Maruyama step of the state, the damped tangent recursion
//
//   v' = v - a v dt + (grad_v F + dF/dg)(x) dt + (dsigma.v + dsigma/dg)(x) db
//
// and the kernel weight increment I = (db . a v) / sigma(x). Within a step the
// order is: draw db, evaluate a, form I, advance x, advance v; I therefore
// uses the pre-update x and v.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pathkernel/model.hpp"
#include "pathkernel/rng.hpp"
#include "pathkernel/schedule.hpp"

namespace pathkernel {

/// Paths whose tangent norm passes this cap are flagged as overflowed.
inline constexpr double kTangentOverflow = 1e12;

State euler_step(const SdeModel& model, std::span<const double> x,
                 const ParamPoint& point, double dt,
                 std::span<const double> db);

TangentVector tangent_step(const SdeModel& model, std::span<const double> x,
                           std::span<const double> v, const ParamPoint& point,
                           double alpha, double dt,
                           std::span<const double> db);

/// Throws DegenerateDiffusionError when sigma(x) <= 0.
double kernel_increment(const SdeModel& model, std::span<const double> x,
                        std::span<const double> v, const ParamPoint& point,
                        double alpha, std::span<const double> db);

bool is_finite(std::span<const double> values);
double norm2(std::span<const double> values);

/// Per-path result of the finite-horizon loop.
struct PathAccumulators {
  double phi = 0.0;  // Phi(x_N)
  double s1 = 0.0;   // dPhi(x_N) . v_N
  double s2 = 0.0;   // sum_n I_n
  bool overflowed = false;
  std::optional<std::uint64_t> overflow_step;
  double max_tangent_norm = 0.0;
};

struct StepRecord {
  State x_next;
  TangentVector v_next;
  double kernel_increment = 0.0;
};

/// Reusable scratch space plus the allocation-free step used by the loops.
class Stepper {
 public:
  Stepper(const SdeModel& model, const ParamPoint& point, double dt);

  /// Advances x and v in place and returns I_n. `db` must already hold the
  /// increment of this step.
  double advance(std::span<double> x, std::span<double> v, double alpha,
                 std::span<const double> db);

  /// State-only step (spin-up, oracle sweeps, observable averages).
  void advance_state(std::span<double> x, std::span<const double> db);

  double dt() const noexcept { return dt_; }

 private:
  const SdeModel& model_;
  ParamPoint point_;
  double dt_;
  std::vector<double> drift_;
  std::vector<double> jvp_;
  std::vector<double> dgamma_;
};

/// Full step record (allocating); convenient for tests and tracing.
StepRecord full_step(const SdeModel& model, std::span<const double> x,
                     std::span<const double> v, const ParamPoint& point,
                     double alpha, double dt, std::span<const double> db);

/// Runs one finite-horizon path of N steps with O(M) memory.
PathAccumulators simulate_path(const SdeModel& model,
                               const Observable& observable,
                               const Schedule& schedule,
                               const ParamPoint& point, double dt,
                               std::size_t steps, RngStream& stream);

/// State-only path; returns Phi(x_N) or nullopt on overflow.
std::optional<double> simulate_observable(const SdeModel& model,
                                          const Observable& observable,
                                          double gamma, double dt,
                                          std::size_t steps,
                                          RngStream& stream);

}  // namespace pathkernel
