#include "pathkernel/rng.hpp"

#include <cmath>
#include <numbers>

#include "pathkernel/errors.hpp"

namespace pathkernel {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

// Uniform in (0, 1] from the top 53 bits.
double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t path_index,
                     std::uint64_t step)
    : seed_(master_seed), path_(path_index), step_(step) {}

void RngStream::standard_normals(std::uint64_t seed, std::uint64_t path,
                                 std::uint64_t step, std::span<double> out) {
  // counter = (block, step lo, step hi, path); two normals per block.
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  if (path > 0xFFFFFFFFull) throw ConfigError("path index exceeds 2^32");
  const std::size_t n = out.size();
  for (std::size_t block = 0; 2 * block < n; ++block) {
    const auto r = philox4x32({static_cast<std::uint32_t>(block),
                               static_cast<std::uint32_t>(step),
                               static_cast<std::uint32_t>(step >> 32),
                               static_cast<std::uint32_t>(path)},
                              key);
    const double u1 = to_unit(r[0], r[1]);
    const double u2 = to_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[2 * block] = radius * std::cos(angle);
    if (2 * block + 1 < n) out[2 * block + 1] = radius * std::sin(angle);
  }
}

void RngStream::gaussian_increment(double dt, std::span<double> out) {
  if (!(dt > 0.0)) throw ConfigError("gaussian_increment: dt must be positive");
  if (out.empty()) throw ConfigError("gaussian_increment: dimension must be >= 1");
  standard_normals(seed_, path_, step_, out);
  const double scale = std::sqrt(dt);
  for (double& z : out) z *= scale;
  ++step_;
}

std::vector<double> RngStream::gaussian_increment(double dt, std::size_t dim) {
  std::vector<double> out(dim);
  gaussian_increment(dt, out);
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace pathkernel
