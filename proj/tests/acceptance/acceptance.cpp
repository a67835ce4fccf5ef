// Acceptance checks. One line per criterion, nonzero exit if any fails.
// All tolerances, seeds and budgets are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathkernel/cli.hpp"
#include "pathkernel/errors.hpp"
#include "pathkernel/estimators.hpp"
#include "pathkernel/integrator.hpp"
#include "pathkernel/models.hpp"
#include "pathkernel/oracles.hpp"

using namespace pathkernel;

namespace {

constexpr double kCombinedSigmas = 4.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5g", x);
  return buf;
}

std::string pm(const SensitivityEstimate& e) {
  return fmt(e.value) + " +- " + fmt(e.std_error);
}

bool agree(const SensitivityEstimate& a, const SensitivityEstimate& b,
           std::ostringstream& os) {
  const double diff = std::abs(a.value - b.value);
  const double tol = kCombinedSigmas * std::hypot(a.std_error, b.std_error);
  os << " |diff| " << fmt(diff) << " vs " << fmt(tol);
  return diff <= tol;
}

// ---------------------------------------------------------------- Gaussian

FiniteTimeOptions gauss_budget(std::uint64_t seed) {
  FiniteTimeOptions o;
  o.dt = 0.01;
  o.steps = 100;  // T = 1
  o.paths = 100000;
  o.seed = seed;
  return o;
}

SensitivityEstimate gauss_run(const Schedule& s, std::uint64_t seed) {
  const GaussModel model(Param::diffusion);
  return estimate_finite_time(model, SquareObservable{}, s, {0.0, Param::diffusion},
                              gauss_budget(seed));
}

Outcome gaussian_analytic() {
  const double exact = 2.0;
  const double rel_tol = 0.05;
  Outcome out{true, ""};
  std::ostringstream os;
  for (const auto& s : {Schedule::zero(), Schedule::constant(1.0), Schedule::constant(10.0),
                        Schedule::pure_kernel(0.01)}) {
    const auto e = gauss_run(s, 1);
    const bool ok = std::abs(e.value - exact) <= rel_tol * exact;
    out.pass = out.pass && ok;
    os << s.label() << ": " << pm(e) << (ok ? "" : " (outside 5%)") << "; ";
  }
  out.detail = os.str();
  return out;
}

Outcome gaussian_schedule_invariance() {
  const std::vector<Schedule> schedules{Schedule::zero(), Schedule::constant(1.0),
                                        Schedule::pure_kernel(0.01)};
  std::vector<SensitivityEstimate> est;
  for (std::size_t i = 0; i < schedules.size(); ++i)
    est.push_back(gauss_run(schedules[i], 100 + i));  // independent samples
  Outcome out{true, ""};
  std::ostringstream os;
  for (std::size_t i = 0; i < est.size(); ++i)
    for (std::size_t j = i + 1; j < est.size(); ++j) {
      os << schedules[i].label() << "/" << schedules[j].label();
      out.pass = agree(est[i], est[j], os) && out.pass;
      os << "; ";
    }
  const double var_kernel = est[2].sample_variance;
  const double var_zero = est[0].sample_variance;
  os << "var(kernel) " << fmt(var_kernel) << " > var(zero) " << fmt(var_zero);
  out.pass = out.pass && var_kernel > var_zero;
  out.detail = os.str();
  return out;
}

// ---------------------------------------------------------------- OU

Outcome ou_ergodic() {
  ErgodicOptions o;
  o.dt = 0.01;
  o.steps = 2000000;  // T = 2e4
  o.window = 800;     // W = 8, truncation bias exp(-8) ~ 3e-4
  o.spinup = 2000;
  o.seed = 7;
  const OuModel drift(Param::drift);
  const auto a = estimate_ergodic(drift, MeanObservable{}, Schedule::constant(1.0),
                                  {0.0, Param::drift}, o);
  o.seed = 8;
  const OuModel diffusion(Param::diffusion);
  const auto b = estimate_ergodic(diffusion, SquareObservable{}, Schedule::constant(1.0),
                                  {0.0, Param::diffusion}, o);
  const bool ok_a = std::abs(a.value - 1.0) <= kCombinedSigmas * a.std_error;
  const bool ok_b = std::abs(b.value - 1.0) <= kCombinedSigmas * b.std_error;
  return {ok_a && ok_b, "T = 2e4, W = 8: drift/x " + pm(a) + ", diffusion/x^2 " + pm(b) +
                            " (target 1, 4 se)"};
}

// ---------------------------------------------------------------- Lorenz 96

constexpr double kL96Dt = 0.002;

Outcome l96_finite_time() {
  Outcome out{true, ""};
  std::ostringstream os;
  for (Param p : {Param::drift, Param::diffusion, Param::initial}) {
    const Lorenz96Model model(p);
    FiniteTimeOptions o;
    o.dt = kL96Dt;
    o.steps = 500;  // T = 1
    o.paths = 10000;
    o.seed = 11;
    const auto pk = estimate_finite_time(model, MeanObservable{}, Schedule::constant(10.0),
                                         {0.0, p}, o);
    FdOracleConfig cfg;  // h = 0.05, common seed
    const auto fd =
        fd_derivative_finite_time(model, MeanObservable{}, 0.0, kL96Dt, 500, 2000, 12, cfg);
    os << to_string(p) << ": pk " << pm(pk) << ", fd " << pm(fd);
    out.pass = agree(pk, fd, os) && out.pass;
    os << "; ";
  }
  out.detail = os.str();
  return out;
}

ErgodicOptions l96_orbit(std::uint64_t seed) {
  ErgodicOptions o;
  o.dt = kL96Dt;
  o.steps = 500000;  // T = 1000
  o.window = 500;    // W = 1
  o.spinup = 5000;
  o.seed = seed;
  return o;
}

struct L96Ergodic {
  SensitivityEstimate g0, g1, g1_kernel;
};

const L96Ergodic& l96_ergodic_runs() {
  static const L96Ergodic runs = [] {
    L96Ergodic r;
    const Lorenz96Model g0(Param::drift), g1(Param::diffusion);
    r.g0 = estimate_ergodic(g0, MeanObservable{}, Schedule::constant(10.0),
                            {0.0, Param::drift}, l96_orbit(21));
    r.g1 = estimate_ergodic(g1, MeanObservable{}, Schedule::constant(10.0),
                            {0.0, Param::diffusion}, l96_orbit(22));
    r.g1_kernel = estimate_ergodic(g1, MeanObservable{}, Schedule::pure_kernel(kL96Dt),
                                   {0.0, Param::diffusion}, l96_orbit(22));
    return r;
  }();
  return runs;
}

Outcome l96_ergodic() {
  const auto& r = l96_ergodic_runs();
  // h = 0.2 keeps the difference quotient above the time-average noise.
  FdOracleConfig cfg{0.2, Coupling::independent, 4, 1};
  const Lorenz96Model g0(Param::drift), g1(Param::diffusion);
  const auto fd0 = fd_derivative_ergodic(g0, MeanObservable{}, 0.0, kL96Dt, 500000, 5000, 31, cfg);
  const auto fd1 = fd_derivative_ergodic(g1, MeanObservable{}, 0.0, kL96Dt, 500000, 5000, 32, cfg);
  std::ostringstream os;
  os << "drift: pk " << pm(r.g0) << ", fd " << pm(fd0);
  bool ok = agree(r.g0, fd0, os);
  os << "; diffusion: pk " << pm(r.g1) << ", fd " << pm(fd1);
  ok = agree(r.g1, fd1, os) && ok;
  return {ok, os.str()};
}

Outcome l96_variance() {
  const auto& r = l96_ergodic_runs();
  const double damped = r.g1.sample_variance;
  const double kernel = r.g1_kernel.sample_variance;
  return {damped < kernel, "batch variance alpha=10 " + fmt(damped) +
                               " < alpha=1/dt " + fmt(kernel) + " (same orbit, same batches)"};
}

Outcome l96_instability() {
  const double bounded_cap = 1e3;
  std::ostringstream os;
  const Lorenz96Model g0(Param::drift);
  auto o = l96_orbit(21);
  o.tolerate_overflow = true;
  const auto undamped =
      estimate_ergodic(g0, MeanObservable{}, Schedule::zero(), {0.0, Param::drift}, o);
  const bool overflowed = undamped.overflow_count == 1 && undamped.first_overflow_step &&
                          undamped.max_tangent_norm > kTangentOverflow;
  os << "alpha=0: ";
  if (overflowed)
    os << "overflow at step " << *undamped.first_overflow_step << " of " << o.steps;
  else
    os << "no overflow, max |v| " << fmt(undamped.max_tangent_norm);

  const double damped_max = l96_ergodic_runs().g0.max_tangent_norm;
  const bool bounded = damped_max < bounded_cap && l96_ergodic_runs().g0.overflow_count == 0;
  os << "; alpha=10: max |v| " << fmt(damped_max) << " (cap " << fmt(bounded_cap) << ")";

  const auto lyap = top_lyapunov(g0, 0.0, kL96Dt, 100000, 41, 10, 5000);
  const bool lyap_ok = lyap.exponent > 0.0 && 10.0 > lyap.exponent;
  os << "; lambda " << fmt(lyap.exponent) << " in (0, 10)";
  return {overflowed && bounded && lyap_ok, os.str()};
}

// ---------------------------------------------------------------- identities

Outcome degeneration_identities() {
  std::ostringstream os;
  bool ok = true;

  // zero schedule: no kernel weight at all
  std::size_t zero_paths = 0;
  for (Param p : {Param::drift, Param::diffusion, Param::initial}) {
    const Lorenz96Model model(p);
    FiniteTimeOptions o;
    o.dt = kL96Dt;
    o.steps = 500;
    o.paths = 50;
    o.seed = 51;
    for (const auto& acc :
         simulate_paths(model, MeanObservable{}, Schedule::zero(), {0.0, p}, o)) {
      ok = ok && acc.s2 == 0.0;
      ++zero_paths;
    }
  }
  os << "S2 == 0 on " << zero_paths << " paths";

  // alpha = 1/dt with parameter-free sigma: the tangent restarts every step
  std::size_t kernel_steps = 0;
  bool kernel_ok = true;
  for (Param p : {Param::drift, Param::initial}) {
    const Lorenz96Model model(p);
    const ParamPoint point{0.0, p};
    State x = model.initial_state(0.0);
    TangentVector v = model.initial_tangent();
    RngStream stream(52, 0);
    std::vector<double> jvp(40), dg(40);
    for (int n = 0; n < 500; ++n) {
      const auto db = stream.gaussian_increment(kL96Dt, 40);
      model.drift_jvp(x, 0.0, v, jvp);
      model.drift_dgamma(x, 0.0, dg);
      const auto rec = full_step(model, x, v, point, 1.0 / kL96Dt, kL96Dt, db);
      for (std::size_t i = 0; i < 40; ++i)
        kernel_ok = kernel_ok && rec.v_next[i] == (jvp[i] + dg[i]) * kL96Dt;
      x = rec.x_next;
      v = rec.v_next;
      ++kernel_steps;
    }
  }
  ok = ok && kernel_ok;
  os << "; v' == dF dt on " << kernel_steps << " steps" << (kernel_ok ? "" : " (MISMATCH)");

  // BEL schedule, initial-condition perturbation of the drift-free model:
  // v_N = 0 and S2 = (1/T) int u/sigma dB with u the undamped tangent.
  const GaussModel model(Param::initial, 3);
  const double dt = 0.01;
  const std::size_t steps = 100;
  const double horizon = 1.0;
  const double bel_tol = 1e-12;
  double worst = 0.0;
  bool vn_zero = true;
  SquareObservable phi;
  double pk_sum = 0.0, bel_sum = 0.0;
  const std::size_t paths = 2000;
  for (std::uint64_t path = 0; path < paths; ++path) {
    RngStream stream(53, path);
    const ParamPoint point{0.5, Param::initial};
    State x = model.initial_state(point.gamma);
    TangentVector v = model.initial_tangent();
    const TangentVector u = model.initial_tangent();
    const auto schedule = Schedule::bel(horizon);
    double s2 = 0.0, bel = 0.0;
    for (std::size_t n = 0; n < steps; ++n) {
      const auto db = stream.gaussian_increment(dt, 3);
      const auto rec = full_step(model, x, v, point, schedule.alpha({n, dt, x}), dt, db);
      s2 += rec.kernel_increment;
      double udb = 0.0;
      for (std::size_t i = 0; i < 3; ++i) udb += u[i] * db[i];
      bel += udb / model.diffusion(x, point.gamma);
      x = rec.x_next;
      v = rec.v_next;
    }
    bel /= horizon;
    for (double vi : v) vn_zero = vn_zero && vi == 0.0;
    worst = std::max(worst, std::abs(s2 - bel));
    pk_sum += phi.value(x) * s2;
    bel_sum += phi.value(x) * bel;
  }
  const bool bel_ok = vn_zero && worst <= bel_tol;
  ok = ok && bel_ok;
  os << "; bel: v_N == 0 " << (vn_zero ? "on all" : "NOT on all") << " " << paths
     << " paths, max |S2 - BEL| " << fmt(worst) << " (tol " << fmt(bel_tol)
     << "), E[Phi S2] " << fmt(pk_sum / paths) << " vs " << fmt(bel_sum / paths);
  return {ok, os.str()};
}

// ---------------------------------------------------------------- determinism

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pathkernel_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  struct Case {
    std::string name;
    std::function<void(cli::RunConfig&)> set;
  };
  const std::vector<Case> cases{
      {"l96-finite-sweep",
       [](cli::RunConfig& c) {
         c.command = cli::Command::sweep;
         c.model = "lorenz96";
         c.param = "initial";
         c.dt = kL96Dt;
         c.horizon = 1.0;
         c.paths = 1000;
         c.grid = {-0.1, 0.0, 0.1};
       }},
      {"l96-finite-oracle",
       [](cli::RunConfig& c) {
         c.command = cli::Command::oracle;
         c.model = "lorenz96";
         c.param = "diffusion";
         c.dt = kL96Dt;
         c.paths = 500;
       }},
      {"l96-ergodic-oracle",
       [](cli::RunConfig& c) {
         c.command = cli::Command::oracle;
         c.mode = cli::Mode::ergodic;
         c.model = "lorenz96";
         c.param = "drift";
         c.dt = kL96Dt;
         c.horizon = 20.0;
         c.spinup = 500;
         c.replications = 3;
       }},
  };

  bool ok = true;
  std::ostringstream os;
  for (const auto& cs : cases) {
    std::vector<std::string> csv, meta;
    for (unsigned workers : {1u, 4u}) {
      cli::RunConfig c;
      cs.set(c);
      c.seed = 61;
      c.workers = workers;
      c.out = (dir / (cs.name + "-w" + std::to_string(workers))).string();
      std::ostringstream err, quiet;
      auto* saved = std::cout.rdbuf(quiet.rdbuf());
      const int status = cli::execute(c, err);
      std::cout.rdbuf(saved);
      if (status != 0) {
        os << cs.name << ": run failed: " << err.str();
        ok = false;
        break;
      }
      csv.push_back(slurp(c.out + ".csv"));
      auto j = nlohmann::json::parse(slurp(c.out + ".meta.json"));
      j.erase("timestamp");
      meta.push_back(j.dump());
    }
    const bool same = csv.size() == 2 && csv[0] == csv[1] && meta[0] == meta[1];
    ok = ok && same;
    os << cs.name << (same ? " identical" : " DIFFERS") << "; ";
  }
  fs::remove_all(dir);
  return {ok, os.str() + "workers 1 vs 4"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*check)();
  };
  const Criterion criteria[] = {
      {"gaussian analytic derivative", gaussian_analytic},
      {"gaussian schedule invariance", gaussian_schedule_invariance},
      {"ou ergodic analytic derivatives", ou_ergodic},
      {"lorenz96 finite-time oracle agreement", l96_finite_time},
      {"lorenz96 ergodic oracle agreement", l96_ergodic},
      {"variance below pure kernel", l96_variance},
      {"instability of the undamped tangent", l96_instability},
      {"degeneration identities", degeneration_identities},
      {"determinism across worker counts", determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!r.pass) ++failures;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << r.detail << " ["
              << fmt(secs) << " s]" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
