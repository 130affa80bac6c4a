// idpflow command line: run, bench, riemann, verify, defaults.
//
// Exit codes: 0 ok, 1 verification failed, 2 configuration error,
// 3 solver error, 4 invariant violation.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "idpflow/config.hpp"
#include "idpflow/errors.hpp"
#include "idpflow/parallel.hpp"
#include "idpflow/riemann.hpp"
#include "idpflow/scenario.hpp"

using namespace idpflow;
using nlohmann::json;

namespace {

ScenarioConfig load(const std::string& what) {
  if (std::filesystem::is_regular_file(what)) return parse_config(what);
  for (const auto& n : scenario_names())
    if (n == what) return default_config(n);
  throw ConfigError("'" + what + "' is neither a config file nor a scenario name");
}

void apply_thread_override(ScenarioConfig& c, int cli_threads) {
  if (const char* env = std::getenv("IDPFLOW_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw ConfigError("IDPFLOW_THREADS must be a positive integer");
    c.threads = static_cast<int>(n);
  }
  if (cli_threads > 0) c.threads = cli_threads;
}

NormalData parse_state(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      v.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in state '" + s + "'");
    }
  }
  if (v.size() != 3) throw ConfigError("state '" + s + "' must be rho,v,p");
  if (!(v[0] > 0.) || !(v[2] > 0.)) throw ConfigError("state '" + s + "' needs rho > 0 and p > 0");
  return {v[0], v[1], v[2]};
}

bool report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  return ok;
}

std::string fmt(const char* f, double a, double b = 0., double c = 0.) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool verify_sod() {
  std::vector<double> err;
  for (int n : {100, 200, 400}) {
    Simulation<1> sim([&] {
      auto c = default_config("sod");
      c.cells = {n, 1};
      return c;
    }());
    while (!sim.finished()) sim.step();
    err.push_back(density_l1_error<1>(sim.state().U, sim.scenario().mesh, sim.scenario().g, sim.exact_now()));
  }
  return report("sod", err[1] < err[0] && err[2] < err[1], fmt("L1(rho) %.3e %.3e %.3e", err[0], err[1], err[2]));
}

bool verify_wavespeed() {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> lg(std::log(1e-3), std::log(1e3)), uv(-5., 5.);
  const GasLaw law(1.4);
  long bad = 0, n = 0;
  double worst = 0.;
  for (int k = 0; k < 10000; ++k) {
    const NormalData l{std::exp(lg(rng)), uv(rng), std::exp(lg(rng))};
    const NormalData r{std::exp(lg(rng)), uv(rng), std::exp(lg(rng))};
    double exact;
    try {
      exact = solve_exact(l, r, law).max_speed();
    } catch (const VacuumError&) {
      continue;
    }
    ++n;
    const double bound = max_wavespeed_bound(l, r, law);
    if (bound < exact * (1. - 1e-12)) ++bad;
    worst = std::max(worst, bound / exact);
  }
  return report("wavespeed", bad == 0, fmt("%.0f pairs, %.0f violations, worst ratio %.3f", double(n), double(bad), worst));
}

bool verify_conservation() {
  auto c = default_config("box");
  c.cells = {16, 16};
  Scenario<2> sc(c);
  HyperbolicSolver<2> hyp(sc.g, sc.law, {});
  auto U = sc.U0;
  const auto t0 = total<2>(U, sc.g);
  double t = 0.;
  for (int k = 0; k < 200; ++k) t += hyp.ssprk33_step(U, t, &sc.bm).tau;
  const auto t1 = total<2>(U, sc.g);
  const double dm = std::abs(t1[0] - t0[0]) / t0[0], de = std::abs(t1[3] - t0[3]) / t0[3];
  return report("conservation", dm <= 1e-10 && de <= 1e-10, fmt("200 steps, mass drift %.2e, energy drift %.2e", dm, de));
}

bool verify_becker() {
  std::vector<double> err;
  for (int n : {16, 32}) {
    auto c = default_config("becker");
    c.cells = {n, n};
    c.t_final = 0.1;
    Simulation<2> sim(c);
    while (!sim.finished()) sim.step();
    err.push_back(error_norms<2>(sim.state().U, sim.scenario().mesh, sim.scenario().g, sim.exact_now()).linf);
  }
  return report("becker", err[1] < err[0],
                fmt("delta_inf %.3e -> %.3e, rate %.2f", err[0], err[1], std::log2(err[0] / err[1])));
}

int run_guarded(const std::function<int()>& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant-domain preserving compressible Navier-Stokes solver"};
  app.require_subcommand(1);

  std::string cfg_path, left, right, suite, scenario, outdir;
  int threads = 0, steps = 10, samples = 0;
  std::vector<int> bench_threads{1, 2, 4, 8};
  double gamma = 1.4, t_sample = 0.2, x0 = 0.5;

  auto* run = app.add_subcommand("run", "run a scenario to t_final");
  run->add_option("config", cfg_path, "config file (JSON) or scenario name")->required();
  run->add_option("--threads", threads, "thread count (overrides config and IDPFLOW_THREADS)");
  run->add_option("--output-dir", outdir, "output directory");

  auto* bench = app.add_subcommand("bench", "time hyperbolic and parabolic stages");
  bench->add_option("config", cfg_path, "config file (JSON) or scenario name")->required();
  bench->add_option("--threads", bench_threads, "thread counts")->delimiter(',');
  bench->add_option("--steps", steps, "Strang steps per thread count")->check(CLI::PositiveNumber);

  auto* riemann = app.add_subcommand("riemann", "exact Riemann solution for rho,v,p states");
  riemann->add_option("left", left)->required();
  riemann->add_option("right", right)->required();
  riemann->add_option("--gamma", gamma);
  riemann->add_option("--samples", samples, "print this many profile samples on [0,1] at --time");
  riemann->add_option("--time", t_sample);
  riemann->add_option("--x0", x0);

  auto* verify = app.add_subcommand("verify", "quick self checks");
  verify->add_option("suite", suite, "sod, wavespeed, conservation, becker or all")->required();

  auto* defaults = app.add_subcommand("defaults", "print the default config of a scenario");
  defaults->add_option("scenario", scenario)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run)
    return run_guarded([&] {
      auto c = load(cfg_path);
      apply_thread_override(c, threads);
      if (!outdir.empty()) c.output_dir = outdir;
      std::cout << run_scenario(c).dump(2) << '\n';
      return 0;
    });
  if (*bench)
    return run_guarded([&] {
      auto c = load(cfg_path);
      std::cout << bench_scenario(c, bench_threads, steps).dump(2) << '\n';
      return 0;
    });
  if (*riemann)
    return run_guarded([&] {
      const GasLaw law(gamma);
      const auto l = parse_state(left), r = parse_state(right);
      const auto fan = solve_exact(l, r, law);
      json j = {{"pstar", fan.pstar},
                {"vstar", fan.vstar},
                {"rho_star_left", fan.rho_star_left},
                {"rho_star_right", fan.rho_star_right},
                {"left_wave", fan.left_kind == WaveKind::shock ? "shock" : "rarefaction"},
                {"right_wave", fan.right_kind == WaveKind::shock ? "shock" : "rarefaction"},
                {"left_wave_speed", fan.left_wave_speed},
                {"right_wave_speed", fan.right_wave_speed},
                {"max_wavespeed_bound", max_wavespeed_bound(l, r, law)},
                {"iterations", fan.iterations}};
      std::cout << j.dump(2) << '\n';
      if (samples > 0) {
        if (!(t_sample > 0.)) throw ConfigError("--time must be positive");
        std::printf("x,rho,v,p\n");
        for (int k = 0; k < samples; ++k) {
          const double x = (k + 0.5) / samples, xi = (x - x0) / t_sample;
          const NormalData ls{l.rho, l.vn - xi, l.p}, rs{r.rho, r.vn - xi, r.p};
          const auto w = sample_at_zero(solve_exact(ls, rs, law), ls, rs, law);
          std::printf("%.17g,%.17g,%.17g,%.17g\n", x, w.rho, w.vn + xi, w.p);
        }
      }
      return 0;
    });
  if (*verify)
    return run_guarded([&] {
      set_thread_count(1);
      const std::map<std::string, std::function<bool()>> suites = {
          {"sod", verify_sod}, {"wavespeed", verify_wavespeed}, {"conservation", verify_conservation},
          {"becker", verify_becker}};
      bool ok = true;
      if (suite == "all") {
        for (const auto& [name, f] : suites) ok = f() && ok;
      } else {
        const auto it = suites.find(suite);
        if (it == suites.end()) throw ConfigError("unknown suite '" + suite + "' (sod, wavespeed, conservation, becker, all)");
        ok = it->second();
      }
      return ok ? 0 : 1;
    });
  if (*defaults)
    return run_guarded([&] {
      std::cout << to_json(default_config(scenario)).dump(2) << '\n';
      return 0;
    });
  return 0;
}
