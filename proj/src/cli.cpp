#include "pathkernel/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pathkernel/errors.hpp"
#include "pathkernel/models.hpp"
#include "pathkernel/oracles.hpp"
#include "pathkernel/schedule.hpp"

namespace pathkernel::cli {

namespace {

const char* command_name(Command c) {
  switch (c) {
    case Command::run:
      return "run";
    case Command::sweep:
      return "sweep";
    case Command::lyapunov:
      return "lyapunov";
    case Command::oracle:
      return "oracle";
  }
  return "?";
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::size_t steps_for(double span, double dt, const char* what) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("--dt must be positive");
  if (!(span > 0.0) || !std::isfinite(span))
    throw ConfigError(std::string(what) + " must be positive");
  const double ratio = span / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError(std::string(what) + " must be a positive multiple of --dt");
  return static_cast<std::size_t>(rounded);
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

void write_meta(const RunConfig& config, nlohmann::json body) {
  body["command"] = command_name(config.command);
  body["config"] = echo(config);
  body["timestamp"] = timestamp();
  write_file(config.out + ".meta.json", body.dump(2) + "\n");
}

struct Setup {
  std::unique_ptr<SdeModel> model;
  std::shared_ptr<const Observable> observable;
  Param param;
};

Setup setup(const RunConfig& config) {
  Setup s;
  s.param = param_from_string(config.param);
  s.model = make_model(config.model, s.param, config.model_params);
  s.observable = make_observable(config.observable);
  return s;
}

SensitivityEstimate run_estimator(const RunConfig& config, const Setup& s,
                                  double gamma) {
  const Schedule schedule =
      Schedule::parse(config.schedule, config.dt, config.horizon);
  const ParamPoint point{gamma, s.param};
  if (config.mode == Mode::finite) {
    FiniteTimeOptions o;
    o.dt = config.dt;
    o.steps = config.steps();
    o.paths = config.paths;
    o.seed = config.seed;
    o.workers = config.workers;
    o.tolerate_overflow = config.tolerate_overflow;
    return estimate_finite_time(*s.model, *s.observable, schedule, point, o);
  }
  ErgodicOptions o;
  o.dt = config.dt;
  o.steps = config.steps();
  o.window = config.window_steps();
  o.spinup = config.spinup;
  o.batch_length = config.batch;
  o.seed = config.seed;
  o.tolerate_overflow = config.tolerate_overflow;
  return estimate_ergodic(*s.model, *s.observable, schedule, point, o);
}

SensitivityEstimate run_oracle(const RunConfig& config, const Setup& s,
                               double gamma) {
  FdOracleConfig cfg;
  cfg.h = config.fd_h;
  cfg.workers = config.workers;
  cfg.replications = config.replications;
  if (config.mode == Mode::finite) {
    cfg.coupling = config.coupling == "independent" ? Coupling::independent
                                                    : Coupling::common_seed;
    return fd_derivative_finite_time(*s.model, *s.observable, gamma, config.dt,
                                     config.steps(), config.paths, config.seed,
                                     cfg);
  }
  cfg.coupling = config.coupling == "common" ? Coupling::common_seed
                                             : Coupling::independent;
  return fd_derivative_ergodic(*s.model, *s.observable, gamma, config.dt,
                               config.steps(), config.spinup, config.seed, cfg);
}

void write_trace(const RunConfig& config, const Setup& s) {
  const std::size_t m = s.model->dim();
  for (std::size_t c : config.trace_coords)
    if (c >= m) throw ConfigError("--trace-coords index out of range");
  std::ostringstream os;
  os << "t";
  for (std::size_t c : config.trace_coords) os << ",x" << c;
  os << "\n";
  RngStream stream(config.seed, 0);
  Stepper stepper(*s.model, ParamPoint{config.gamma, s.param}, config.dt);
  State x = s.model->initial_state(config.gamma);
  std::vector<double> db(m);
  const std::size_t steps = config.steps();
  for (std::size_t n = 0; n <= steps; ++n) {
    os << format_double(static_cast<double>(n) * config.dt);
    for (std::size_t c : config.trace_coords) os << "," << format_double(x[c]);
    os << "\n";
    if (n == steps) break;
    stream.gaussian_increment(config.dt, db);
    stepper.advance_state(x, db);
  }
  write_file(config.trace, os.str());
}

int do_run(const RunConfig& config, bool oracle) {
  const Setup s = setup(config);
  const SensitivityEstimate est =
      oracle ? run_oracle(config, s, config.gamma) : run_estimator(config, s, config.gamma);
  write_file(config.out + ".csv",
             csv_header(false) + csv_row(to_row(config.gamma, est), false));
  write_meta(config, {{"estimate", to_json(est)}});
  if (!config.trace.empty()) write_trace(config, s);
  std::cout << (oracle ? "oracle" : "estimate") << " " << format_double(est.value)
            << " +- " << format_double(est.std_error) << "\n";
  return est.overflow_count > 0 && config.mode == Mode::ergodic ? 3 : 0;
}

int do_sweep(const RunConfig& config, std::ostream& err) {
  const Setup s = setup(config);
  std::unique_ptr<SdeModel> noiseless;
  if (config.noiseless_column) {
    ModelParams mp = config.model_params;
    mp.sigma0 = 0.0;
    noiseless = make_model(config.model, s.param, mp);
  }

  std::string csv = csv_header(config.noiseless_column);
  nlohmann::json records = nlohmann::json::array();
  int status = 0;
  for (double gamma : config.grid) {
    try {
      const SensitivityEstimate est = run_estimator(config, s, gamma);
      SweepRow row = to_row(gamma, est);
      if (noiseless) {
        ErgodicOptions o;
        o.dt = config.dt;
        o.steps = config.steps();
        o.spinup = config.spinup;
        o.seed = config.seed;
        // Equal coordinates stay equal without noise; nudge one of them.
        o.start = noiseless->initial_state(gamma);
        o.start[0] += 0.01;
        row.phi_avg_noiseless =
            observable_average(*noiseless, *s.observable, gamma, o).mean;
      }
      csv += csv_row(row, config.noiseless_column);
      records.push_back(to_json(est));
    } catch (const Error& e) {
      err << "sweep aborted at gamma = " << format_double(gamma) << ": "
          << e.what() << "\n";
      status = 3;
      break;
    }
  }
  write_file(config.out + ".csv", csv);
  write_meta(config, {{"estimates", records}, {"complete", status == 0}});
  return status;
}

int do_lyapunov(const RunConfig& config) {
  const Setup s = setup(config);
  const LyapunovResult r =
      top_lyapunov(*s.model, config.gamma, config.dt, config.steps(), config.seed,
                   config.renorm, config.spinup);
  std::string csv = "time,lambda\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    csv += format_double(r.times[i]) + "," + format_double(r.trace[i]) + "\n";
  write_file(config.out + ".csv", csv);

  nlohmann::json body = {{"lyapunov_exponent", r.exponent}};
  const Schedule schedule = Schedule::parse(config.schedule, config.dt, config.horizon);
  if (auto alpha = schedule.constant_value()) {
    body["schedule_alpha"] = *alpha;
    body["alpha_exceeds_lambda"] = *alpha > r.exponent;
  }
  write_meta(config, body);
  std::cout << "lambda " << format_double(r.exponent) << "\n";
  return 0;
}

}  // namespace

std::size_t RunConfig::steps() const { return steps_for(horizon, dt, "--T"); }

std::size_t RunConfig::window_steps() const {
  return steps_for(window, dt, "--W");
}

std::string csv_header(bool noiseless_column) {
  std::string h = "gamma,phi_avg,se_phi,dphi,se_dphi,n_samples,overflow_count";
  if (noiseless_column) h += ",phi_avg_noiseless";
  return h + "\n";
}

std::string csv_row(const SweepRow& row, bool noiseless_column) {
  std::ostringstream os;
  os << format_double(row.gamma) << "," << format_double(row.phi_avg) << ","
     << format_double(row.se_phi) << "," << format_double(row.dphi) << ","
     << format_double(row.se_dphi) << "," << row.n_samples << ","
     << row.overflow_count;
  if (noiseless_column)
    os << "," << (row.phi_avg_noiseless ? format_double(*row.phi_avg_noiseless) : "");
  os << "\n";
  return os.str();
}

SweepRow to_row(double gamma, const SensitivityEstimate& e) {
  return {gamma, e.phi_avg, e.phi_std_error, e.value, e.std_error,
          e.n_samples, e.overflow_count, std::nullopt};
}

void validate(const RunConfig& c) {
  const Setup s = setup(c);  // model, parameter and observable names
  (void)s;
  Schedule::parse(c.schedule, c.dt, c.horizon);
  (void)c.steps();
  if (c.workers < 1) throw ConfigError("--workers must be >= 1");
  if (!std::isfinite(c.gamma)) throw ConfigError("--gamma must be finite");

  const bool estimating = c.command == Command::run || c.command == Command::sweep;
  if ((estimating || c.command == Command::oracle) && c.mode == Mode::finite &&
      c.paths < 2)
    throw ConfigError("--L must be >= 2");
  if (c.mode == Mode::ergodic && c.command != Command::lyapunov) {
    const std::size_t nw = c.window_steps();
    if (estimating && nw > c.steps()) throw ConfigError("--W must not exceed --T");
    if (estimating) {
      const std::size_t batch = c.batch == 0 ? 10 * nw : c.batch;
      if (c.steps() % batch != 0 || c.steps() / batch < 2)
        throw ConfigError("--batch must divide T/dt into at least two batches");
    }
  }
  if (c.command == Command::sweep) {
    if (c.grid.empty()) throw ConfigError("--grid must not be empty");
    for (std::size_t i = 1; i < c.grid.size(); ++i)
      if (!(c.grid[i] > c.grid[i - 1]))
        throw ConfigError("--grid must be strictly increasing");
    if (c.noiseless_column && (c.model != "lorenz96" || c.mode != Mode::ergodic))
      throw ConfigError("--noiseless applies to ergodic lorenz96 sweeps only");
  }
  if (c.command == Command::oracle) {
    if (!(c.fd_h > 0.0)) throw ConfigError("--fd-h must be positive");
    if (!c.coupling.empty() && c.coupling != "common" && c.coupling != "independent")
      throw ConfigError("--coupling must be common or independent");
    if (c.mode == Mode::ergodic && c.replications < 2)
      throw ConfigError("--replications must be >= 2");
  }
  if (c.command == Command::lyapunov && c.renorm < 1)
    throw ConfigError("--renorm must be >= 1");
}

nlohmann::json echo(const RunConfig& c) {
  return {{"mode", c.mode == Mode::finite ? "finite" : "ergodic"},
          {"model", c.model},
          {"model_params",
           {{"dim", c.model_params.dim},
            {"sigma0", c.model_params.sigma0},
            {"rate", c.model_params.rate},
            {"sigma", c.model_params.sigma},
            {"x0", c.model_params.x0}}},
          {"observable", c.observable},
          {"param", c.param},
          {"gamma", c.gamma},
          {"grid", c.grid},
          {"dt", c.dt},
          {"T", c.horizon},
          {"W", c.window},
          {"mpre", c.spinup},
          {"L", c.paths},
          {"batch", c.batch},
          {"schedule", c.schedule},
          {"seed", c.seed},
          {"tolerate_overflow", c.tolerate_overflow},
          {"noiseless", c.noiseless_column},
          {"h", c.fd_h},
          {"coupling", c.coupling},
          {"replications", c.replications},
          {"renorm", c.renorm}};
}

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv,
                                            int& exit_code) {
  CLI::App app{"Path-kernel linear response estimator for SDEs", "pathkernel"};
  app.set_config("--config", "", "TOML/INI config file; flags override it");
  app.require_subcommand(1);

  RunConfig config;
  std::string mode = "finite";

  auto add_common = [&](CLI::App* sub) {
    sub->fallthrough();
    sub->configurable();
    sub->add_option("--model", config.model, "lorenz96 | ou | gauss");
    sub->add_option("--param", config.param, "drift|diffusion|initial (g0|g1|g2)");
    sub->add_option("--observable", config.observable, "mean|x|square|x2");
    sub->add_option("--gamma", config.gamma, "base parameter value");
    sub->add_option("--dt", config.dt, "time step");
    sub->add_option("--T", config.horizon, "horizon or orbit length");
    sub->add_option("--mpre", config.spinup, "spin-up steps");
    sub->add_option("--seed", config.seed, "master seed");
    sub->add_option("--workers", config.workers, "worker threads");
    sub->add_option("--schedule", config.schedule, "const:<a> | zero | kernel | bel");
    sub->add_option("--out", config.out, "output prefix (<out>.csv, <out>.meta.json)");
    sub->add_option("--M", config.model_params.dim, "model dimension");
    sub->add_option("--sigma0", config.model_params.sigma0, "lorenz96 base noise");
    sub->add_option("--rate", config.model_params.rate, "ou mean-reversion rate");
    sub->add_option("--sigma", config.model_params.sigma, "ou base noise");
    sub->add_option("--x0", config.model_params.x0, "ou initial value");
  };
  auto add_estimation = [&](CLI::App* sub) {
    sub->add_option("--mode", mode, "finite | ergodic")
        ->check(CLI::IsMember({"finite", "ergodic"}));
    sub->add_option("--W", config.window, "decorrelation window (ergodic)");
    sub->add_option("--L", config.paths, "number of sample paths (finite)");
    sub->add_option("--batch", config.batch, "batch length in steps (ergodic)");
    sub->add_flag("--tolerate-overflow", config.tolerate_overflow,
                  "report overflowed paths instead of aborting");
  };

  auto* run = app.add_subcommand("run", "estimate one derivative");
  add_common(run);
  add_estimation(run);
  run->add_option("--trace", config.trace, "also write an orbit trace CSV");
  run->add_option("--trace-coords", config.trace_coords, "coordinates to trace")
      ->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "estimate over a gamma grid");
  add_common(sweep);
  add_estimation(sweep);
  sweep->add_option("--grid", config.grid, "comma-separated gamma values")
      ->delimiter(',');
  sweep->add_flag("--noiseless", config.noiseless_column,
                  "append sigma = 0 observable averages (lorenz96, ergodic)");

  auto* lyap = app.add_subcommand("lyapunov", "top Lyapunov exponent");
  add_common(lyap);
  lyap->add_option("--renorm", config.renorm, "renormalization interval (steps)");

  auto* oracle = app.add_subcommand("oracle", "finite-difference reference");
  add_common(oracle);
  add_estimation(oracle);
  oracle->add_option("--fd-h", config.fd_h, "central-difference step in gamma");
  oracle->add_option("--coupling", config.coupling, "common | independent");
  oracle->add_option("--replications", config.replications,
                     "independent orbits per side (ergodic)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    exit_code = app.exit(e);
    return std::nullopt;
  }
  if (run->parsed()) config.command = Command::run;
  if (sweep->parsed()) config.command = Command::sweep;
  if (lyap->parsed()) config.command = Command::lyapunov;
  if (oracle->parsed()) config.command = Command::oracle;
  config.mode = mode == "ergodic" ? Mode::ergodic : Mode::finite;
  exit_code = 0;
  return config;
}

int execute(const RunConfig& config, std::ostream& err) {
  try {
    validate(config);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  }
  try {
    switch (config.command) {
      case Command::run:
        return do_run(config, false);
      case Command::oracle:
        return do_run(config, true);
      case Command::sweep:
        return do_sweep(config, err);
      case Command::lyapunov:
        return do_lyapunov(config);
    }
  } catch (const OverflowError& e) {
    err << "aborted: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int main(int argc, const char* const* argv) {
  int exit_code = 0;
  const auto config = parse_command_line(argc, argv, exit_code);
  if (!config) return exit_code;
  return execute(*config, std::cerr);
}

}  // namespace pathkernel::cli
