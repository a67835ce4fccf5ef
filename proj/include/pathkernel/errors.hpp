#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pathkernel {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or precondition violation, raised before any compute.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The kernel weight divides by sigma, so sigma(x) <= 0 is fatal.
class DegenerateDiffusionError : public Error {
 public:
  using Error::Error;
};

/// A path or orbit left the finite range (or the tangent norm passed the cap).
class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, std::uint64_t step)
      : Error(what), step_(step) {}

  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

/// A user-supplied schedule rule returned a non-finite alpha.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

}  // namespace pathkernel
