#pragma once

// Command-line front end: configuration, validation and the four
// subcommands (run, sweep, lyapunov, oracle).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathkernel/estimators.hpp"
#include "pathkernel/registry.hpp"

namespace pathkernel::cli {

enum class Command { run, sweep, lyapunov, oracle };
enum class Mode { finite, ergodic };

struct RunConfig {
  Command command = Command::run;
  Mode mode = Mode::finite;

  std::string model = "gauss";
  ModelParams model_params;
  std::string observable = "mean";
  std::string param = "diffusion";
  double gamma = 0.0;
  std::vector<double> grid;  // sweep

  double dt = 0.01;
  double horizon = 1.0;      // T
  double window = 1.0;       // W (ergodic)
  std::size_t spinup = 1000; // M_pre in steps (ergodic)
  std::size_t paths = 1000;  // L
  std::size_t batch = 0;     // ergodic batch length in steps, 0 = 10 N_W

  std::string schedule = "const:10";
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool tolerate_overflow = false;
  bool noiseless_column = false;

  // oracle
  double fd_h = 0.05;
  std::string coupling;      // empty: per-mode default
  std::size_t replications = 4;

  // lyapunov
  std::size_t renorm = 10;

  std::string out = "result";
  std::string trace;         // optional orbit trace CSV
  std::vector<std::size_t> trace_coords = {0, 1};

  std::size_t steps() const;
  std::size_t window_steps() const;
};

/// Parses argv (CLI11, including --config files). Returns nullopt and sets
/// `exit_code` when parsing ends the program (help, errors).
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv,
                                            int& exit_code);

/// Throws ConfigError on unknown names or out-of-range numbers.
void validate(const RunConfig& config);

nlohmann::json echo(const RunConfig& config);

/// Column order is fixed: gamma,phi_avg,se_phi,dphi,se_dphi,n_samples,
/// overflow_count (+ phi_avg_noiseless when requested).
struct SweepRow {
  double gamma = 0.0;
  double phi_avg = 0.0;
  double se_phi = 0.0;
  double dphi = 0.0;
  double se_dphi = 0.0;
  std::size_t n_samples = 0;
  std::size_t overflow_count = 0;
  std::optional<double> phi_avg_noiseless;
};

std::string csv_header(bool noiseless_column);
std::string csv_row(const SweepRow& row, bool noiseless_column);
SweepRow to_row(double gamma, const SensitivityEstimate& estimate);

/// Executes the configured command, writing <out>.csv and <out>.meta.json.
/// Returns the process exit status; diagnostics go to `err`.
int execute(const RunConfig& config, std::ostream& err);

/// parse_command_line + execute.
int main(int argc, const char* const* argv);

}  // namespace pathkernel::cli
