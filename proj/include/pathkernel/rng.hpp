#pragma once

// Counter-based Gaussian increments.
//
// The increment drawn for (master_seed, path_index, step, coordinate) is a pure
// function of those four numbers, so results never depend on thread count,
// scheduling or batch size. The bit source is Philox4x32-10 keyed by the
// master seed; normals come from Box-Muller on 53-bit uniforms.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pathkernel {

/// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t path_index,
            std::uint64_t step = 0);

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t path_index() const noexcept { return path_; }
  std::uint64_t step() const noexcept { return step_; }

  /// Fills `out` with i.i.d. N(0, dt) draws for the current step and advances
  /// the step counter by one.
  void gaussian_increment(double dt, std::span<double> out);
  std::vector<double> gaussian_increment(double dt, std::size_t dim);

  /// Standard normals at an explicit address; does not touch the counter.
  static void standard_normals(std::uint64_t seed, std::uint64_t path,
                               std::uint64_t step, std::span<double> out);

 private:
  std::uint64_t seed_;
  std::uint64_t path_;
  std::uint64_t step_;
};

/// Derives an unrelated seed (splitmix64 finalizer); used for independent
/// coupling in the oracles.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace pathkernel
