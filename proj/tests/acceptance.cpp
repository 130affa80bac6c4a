// Acceptance checks. One PASS/FAIL line per criterion on stdout, progress
// on stderr. Exit status: 0 all selected criteria pass, 1 a criterion
// failed, 77 a criterion cannot be assessed on this machine (reported as
// FAIL and as skipped by ctest).

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "idpflow/diagnostics.hpp"
#include "idpflow/errors.hpp"
#include "idpflow/parallel.hpp"
#include "idpflow/riemann.hpp"
#include "idpflow/scenario.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace idpflow;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool assessable = true;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void progress(const std::string& s) { std::cerr << "  .. " << s << std::endl; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <int dim>
double min_internal(const Field<dim>& U) {
  double m = 1e300;
  for (const auto& u : U) m = std::min(m, internal_energy<dim>(u) / u[0]);
  return m;
}

// 1. Becker convergence ------------------------------------------------------

constexpr double becker_t_final = 0.5;

Outcome becker() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> linf;
  std::vector<int> nodes;
  for (int n : {64, 128, 256}) {
    auto c = default_config("becker");
    c.cells = {n, n};
    c.t_final = becker_t_final;
    Simulation<2> sim(c);
    while (!sim.finished()) sim.step();
    const auto e = error_norms<2>(sim.state().U, sim.scenario().mesh, sim.scenario().g, sim.exact_now());
    linf.push_back(e.linf);
    nodes.push_back(sim.scenario().g.n);
    progress(fmt("becker %d nodes: delta_1 %.4e delta_2 %.4e delta_inf %.4e (%ld steps)", nodes.back(), e.l1, e.l2,
                 e.linf, sim.state().step));
  }
  const double r1 = std::log2(linf[0] / linf[1]), r2 = std::log2(linf[1] / linf[2]);
  const double ref = 8.0178e-4;
  const bool ok = r1 >= 1.6 && r2 >= 1.6 && linf[2] <= 3. * ref && linf[2] >= ref / 3.;
  return {ok, fmt("delta_inf %.3e / %.3e / %.3e at %d / %d / %d nodes, rates %.2f %.2f (need >= 1.6), "
                  "finest within x3 of 8.02e-4: %s, %.0f s",
                  linf[0], linf[1], linf[2], nodes[0], nodes[1], nodes[2], r1, r2,
                  (linf[2] <= 3. * ref && linf[2] >= ref / 3.) ? "yes" : "no", seconds_since(t0))};
}

// 2. Wavespeed bound dominance -----------------------------------------------

Outcome wavespeed() {
  std::mt19937_64 rng(20240611);
  long violations = 0, vacuum = 0;
  double worst_ratio = 0.;
  const int pairs = 100000;
  for (int k = 0; k < pairs; ++k) {
    const GasLaw law(testutil::uniform(rng, 1.05, 3.));
    const NormalData l{testutil::log_uniform(rng, 1e-3, 1e3), testutil::uniform(rng, -10., 10.),
                       testutil::log_uniform(rng, 1e-3, 1e3)};
    const NormalData r{testutil::log_uniform(rng, 1e-3, 1e3), testutil::uniform(rng, -10., 10.),
                       testutil::log_uniform(rng, 1e-3, 1e3)};
    double exact;
    try {
      exact = solve_exact(l, r, law).max_speed();
    } catch (const VacuumError&) {
      // two rarefactions around a vacuum: the heads are the extreme speeds
      ++vacuum;
      const double al = std::sqrt(law.gamma() * l.p / l.rho), ar = std::sqrt(law.gamma() * r.p / r.rho);
      exact = std::max(std::abs(l.vn - al), std::abs(r.vn + ar));
    }
    const double bound = max_wavespeed_bound(l, r, law);
    if (!(bound >= exact * (1. - 1e-14))) ++violations;
    worst_ratio = std::max(worst_ratio, bound / exact);
  }
  return {violations == 0 && worst_ratio <= 5.,
          fmt("%d pairs (%ld with vacuum), %ld violations, worst bound/exact %.3f (need <= 5)", pairs, vacuum,
              violations, worst_ratio)};
}

// 3. Conservation after limiting ---------------------------------------------

template <int dim>
double worst_stage_residual(const ScenarioConfig& c, long& steps) {
  Simulation<dim> sim(c);
  double worst = 0.;
  while (!sim.finished()) worst = std::max(worst, sim.step().max_residual);
  steps = sim.state().step;
  return worst;
}

Outcome conservation_after_limiting() {
  long s1 = 0, s2 = 0;
  const double sod = worst_stage_residual<1>(default_config("sod"), s1);
  const double vortex = worst_stage_residual<2>(default_config("vortex"), s2);
  return {sod <= 1e-11 && vortex <= 1e-11,
          fmt("worst per-stage relative defect: sod %.2e over %ld steps, vortex %.2e over %ld steps (need <= 1e-11)",
              sod, s1, vortex, s2)};
}

// 4. Global conservation ------------------------------------------------------

Outcome global_conservation() {
  auto c = default_config("box");
  Scenario<2> sc(c);
  HyperbolicSolver<2> hyp(sc.g, sc.law, {});
  auto U = sc.U0;
  const auto T0 = total<2>(U, sc.g);
  double t = 0., dm = 0., de = 0.;
  for (int k = 0; k < 1000; ++k) {
    t += hyp.ssprk33_step(U, t, &sc.bm).tau;
    const auto T = total<2>(U, sc.g);
    dm = std::max(dm, std::abs(T[0] - T0[0]) / T0[0]);
    de = std::max(de, std::abs(T[3] - T0[3]) / T0[3]);
  }
  return {dm <= 1e-10 && de <= 1e-10,
          fmt("all-slip box, 1000 SSPRK steps to t = %.3f: mass drift %.2e, energy drift %.2e (need <= 1e-10)", t, dm,
              de)};
}

// 5. Invariant domain and local bounds ----------------------------------------

template <int dim>
struct DomainRun {
  long steps = 0;
  double bounds = 0.;
  bool admissible = true;
  std::string error;
};

template <int dim>
DomainRun<dim> invariant_run(ScenarioConfig c) {
  DomainRun<dim> r;
  c.check_bounds = true;
  try {
    Simulation<dim> sim(c);
    while (!sim.finished()) {
      const auto info = sim.step();
      r.bounds = std::max(r.bounds, info.max_bounds_violation);
      for (const auto& u : sim.state().U) r.admissible = r.admissible && is_admissible<dim>(u);
    }
    r.steps = sim.state().step;
  } catch (const std::exception& e) {
    r.admissible = false;
    r.error = e.what();
  }
  return r;
}

Outcome invariant_domain() {
  const double tol = 1e-12;
  std::string detail;
  bool ok = true;
  for (bool relaxed : {true, false}) {
    auto sod = default_config("sod");
    sod.relax_bounds = relaxed;
    sod.cfl = 1.;
    auto st = default_config("shocktube");
    st.cells = {128, 64};
    st.relax_bounds = relaxed;
    const auto a = invariant_run<1>(sod);
    const auto b = invariant_run<2>(st);
    const bool pass = a.admissible && b.admissible && a.bounds <= tol && b.bounds <= tol;
    ok = ok && pass;
    detail += fmt("%s bounds: sod cfl 1 %s %ld steps, worst %.1e; shocktube 128x64 %s %ld steps, worst %.1e%s; ",
                  relaxed ? "relaxed" : "strict", a.admissible ? "admissible" : "NOT admissible", a.steps, a.bounds,
                  b.admissible ? "admissible" : "NOT admissible", b.steps, b.bounds,
                  (a.error + b.error).empty() ? "" : (" (" + a.error + b.error + ")").c_str());
  }
  return {ok, detail + fmt("tolerance %.0e relative", tol)};
}

// 6. Sod accuracy -------------------------------------------------------------

Outcome sod_accuracy() {
  std::vector<double> err;
  for (int n : {100, 200, 400, 800}) {
    auto c = default_config("sod");
    c.cells = {n, 1};
    Simulation<1> sim(c);
    while (!sim.finished()) sim.step();
    err.push_back(density_l1_error<1>(sim.state().U, sim.scenario().mesh, sim.scenario().g, sim.exact_now()));
  }
  bool dec = true;
  for (std::size_t k = 1; k < err.size(); ++k) dec = dec && err[k] < err[k - 1];
  return {dec, fmt("L1(rho) at t = 0.2: %.4e, %.4e, %.4e, %.4e for 100, 200, 400, 800 cells", err[0], err[1], err[2],
                   err[3])};
}

// 7. Non-reflecting vortex -----------------------------------------------------

Outcome vortex() {
  std::string detail;
  bool ok = true;
  for (const std::string method : {"characteristic", "godunov"}) {
    auto c = default_config("vortex");
    const auto [M, vbar] = vortex_preset("ii");
    c.params["mach"] = M;
    c.params["vbar"] = vbar;
    c.nonreflecting = method;
    Simulation<2> sim(c);
    const auto& sc = sim.scenario();
    const double curl0 = max_vorticity(sc.U0, sc.g);
    VortexDiagnostics mx = vortex_diagnostics(sc.U0, sc.g, sc.v_inf, curl0), d = mx;
    while (!sim.finished()) {
      sim.step();
      d = vortex_diagnostics(sim.state().U, sc.g, sc.v_inf, curl0);
      mx.delta1 = std::max(mx.delta1, d.delta1);
      mx.delta2 = std::max(mx.delta2, d.delta2);
    }
    const bool pass = d.delta1 <= 0.1 * mx.delta1 && d.delta2 <= 0.1 * mx.delta2;
    ok = ok && pass;
    detail += fmt("%s: delta1(4)/max %.3e, delta2(4)/max %.3e; ", method.c_str(), d.delta1 / mx.delta1,
                  d.delta2 / mx.delta2);
  }
  return {ok, detail + "need <= 0.1"};
}

// 8. Parabolic step --------------------------------------------------------------

struct Grid {
  Mesh mesh;
  CellValues cv;
  FemGraph g;
};

Grid grid(int dim, int nx, int ny, bool px, bool py, double perturb, std::uint64_t seed = 3) {
  MeshSpec sp;
  sp.dim = dim;
  sp.cells = {nx, dim == 1 ? 1 : ny};
  sp.periodic = {px, py};
  sp.perturbation = perturb;
  sp.seed = seed;
  Grid s;
  s.mesh = build_structured_mesh(sp);
  s.cv = build_cell_values(s.mesh);
  s.g = assemble_graph(s.mesh, s.cv);
  return s;
}

Outcome parabolic() {
  const GasLaw law(1.4);
  // (a) decaying Fourier modes, 1D periodic, lumped-mass eigenvalue closed form
  const int nx = 32;
  const auto s1 = grid(1, nx, 1, true, false, 0.);
  const ViscousModel vm{0.75, 0.1, 0.6};
  const double T = 0.02, kw = 2. * M_PI, h = 1. / nx;
  double min_order = 1e300;
  for (bool velocity : {true, false}) {
    const double w = oracle::periodic_eigenvalue_1d(velocity ? 4. / 3. * vm.mu + vm.lambda : vm.kappa, kw, h);
    std::vector<double> errs;
    for (int steps : {4, 8, 16, 32, 64}) {
      ParabolicSolver<1> ps(s1.mesh, s1.cv, s1.g, law, vm, {});
      Field<1> U(s1.g.n);
      for (int i = 0; i < s1.g.n; ++i) {
        const double x = s1.mesh.node[i][0];
        U[i] = velocity ? State<1>{1., 1e-3 * std::sin(kw * x), 10.} : State<1>{1., 0., 2. + std::sin(kw * x)};
      }
      const double tau = T / steps;
      for (int k = 0; k < steps; ++k) ps.step(U, k * tau, tau);
      double err = 0.;
      for (int i = 0; i < s1.g.n; ++i) {
        const double x = s1.mesh.node[i][0];
        const double got = velocity ? U[i][1] : U[i][2] - 2.;
        err = std::max(err, std::abs(got - (velocity ? 1e-3 : 1.) * std::exp(-w * T) * std::sin(kw * x)));
      }
      errs.push_back(err);
    }
    for (std::size_t k = 1; k < errs.size(); ++k) min_order = std::min(min_order, std::log2(errs[k - 1] / errs[k]));
  }
  const bool a_ok = min_order >= 1.9;

  // (b) energy balance per step, slip and no-slip walls, Neumann energy
  const auto s2 = grid(2, 12, 10, false, false, 0.25);
  ParabolicBoundary bc;
  bc.velocity = {{"bottom", VelocityBC::noslip}, {"left", VelocityBC::slip}, {"top", VelocityBC::slip},
                 {"right", VelocityBC::noslip}};
  const BodyForce f = [](const Point& x, double t, double* out) {
    out[0] = std::cos(2. * x[1]) - t;
    out[1] = x[0] - 0.3;
  };
  std::mt19937_64 rng(8);
  double worst_balance = 0.;
  for (double tau : {1e-4, 1e-2, 1., 100.}) {
    ParabolicSolver<2> ps(s2.mesh, s2.cv, s2.g, law, {0.03, 0.01, 0.05}, bc);
    Field<2> U(s2.g.n);
    for (auto& u : U)
      u = from_primitive<2>({testutil::uniform(rng, 0.5, 2.),
                             {testutil::uniform(rng, -1., 1.), testutil::uniform(rng, -1., 1.)},
                             testutil::uniform(rng, 0.5, 2.)},
                            law);
    for (int step = 0; step < 10; ++step) {
      double E0 = 0., E1 = 0.;
      for (int i = 0; i < s2.g.n; ++i) E0 += s2.g.mass[i] * U[i][3];
      const auto r = ps.step(U, step * tau, tau, f);
      for (int i = 0; i < s2.g.n; ++i) E1 += s2.g.mass[i] * U[i][3];
      worst_balance = std::max(worst_balance, std::abs(E1 - E0 - r.source_work) / E0);
    }
  }
  const bool b_ok = worst_balance <= 1e-10;

  // (c) adversarial data: near-vacuum internal energy next to strong heating
  const auto s3 = grid(2, 16, 16, false, false, 0.);
  int cases = 0, triggered = 0, negative = 0;
  double min_e = 1e300;
  for (int k = 0; k < 20; ++k) {
    ParabolicSolver<2> ps(s3.mesh, s3.cv, s3.g, law, {testutil::log_uniform(rng, 1e-4, 1e-1), 0.,
                                                       testutil::log_uniform(rng, 1., 20.)},
                          {});
    ps.min_principle_trigger = false;
    Field<2> U(s3.g.n);
    const double cx = testutil::uniform(rng, 0.3, 0.7), cy = testutil::uniform(rng, 0.3, 0.7);
    for (int i = 0; i < s3.g.n; ++i) {
      const auto& x = s3.mesh.node[i];
      const bool hot = std::abs(x[0] - cx) < 0.15 && std::abs(x[1] - cy) < 0.15;
      const double rho = testutil::log_uniform(rng, 0.5, 2.);
      const double v = hot ? testutil::uniform(rng, -3., 3.) : 0.;
      U[i] = {rho, rho * v, 0., rho * (hot ? 1. : 1e-8) + 0.5 * rho * v * v};
    }
    // plain Crank-Nicolson probe: the data must actually undershoot
    const auto r = ps.step(U, 0., testutil::log_uniform(rng, 0.5, 5.));
    ++cases;
    triggered += r.fct;
    const double m = min_internal<2>(U);
    min_e = std::min(min_e, m);
    negative += !(m > 0.);
  }
  const bool c_ok = triggered == cases && negative == 0;
  return {a_ok && b_ok && c_ok,
          fmt("(a) min observed CN order %.3f (need >= 1.9); (b) worst energy-balance defect %.2e (need <= 1e-10); "
              "(c) %d adversarial cases, FCT triggered in %d, min e %.3e, negative %d",
              min_order, worst_balance, cases, triggered, min_e, negative)};
}

// 9. Matrix-free fidelity ----------------------------------------------------------

Outcome matrix_free() {
  const GasLaw law(1.4);
  std::mt19937_64 rng(99);
  double worst_a = 0., worst_b = 0.;
  int inputs = 0;
  auto rel = [](const std::vector<double>& x, const std::vector<double>& y) {
    double d = 0., s = 0.;
    for (std::size_t i = 0; i < x.size(); ++i) {
      d = std::max(d, std::abs(x[i] - y[i]));
      s = std::max(s, std::abs(y[i]));
    }
    return d / s;
  };
  const auto s2 = grid(2, 9, 7, false, true, 0.3, 17);
  const auto s1 = grid(1, 13, 1, false, false, 0.3, 5);
  const ViscousModel vm{0.37, 0.21, 0.83};
  ParabolicSolver<2> p2(s2.mesh, s2.cv, s2.g, law, vm, {});
  ParabolicSolver<1> p1(s1.mesh, s1.cv, s1.g, law, vm, {});
  const auto A2 = oracle::elasticity_matrix(s2.mesh, s2.cv, vm.mu, vm.lambda);
  const auto B2 = oracle::laplace_matrix(s2.mesh, s2.cv, vm.kappa);
  const auto A1 = oracle::elasticity_matrix(s1.mesh, s1.cv, vm.mu, vm.lambda);
  const auto B1 = oracle::laplace_matrix(s1.mesh, s1.cv, vm.kappa);
  auto rnd = [&](int n) {
    std::vector<double> x(n);
    for (auto& v : x) v = testutil::uniform(rng, -1., 1.);
    return x;
  };
  for (int k = 0; k < 50; ++k) {
    std::vector<double> y;
    auto w = rnd(A2.n);
    p2.apply_velocity_operator(w, y);
    worst_a = std::max(worst_a, rel(y, A2.mul(w)));
    auto e = rnd(B2.n);
    p2.apply_conduction_operator(e, y);
    worst_b = std::max(worst_b, rel(y, B2.mul(e)));
    w = rnd(A1.n);
    p1.apply_velocity_operator(w, y);
    worst_a = std::max(worst_a, rel(y, A1.mul(w)));
    e = rnd(B1.n);
    p1.apply_conduction_operator(e, y);
    worst_b = std::max(worst_b, rel(y, B1.mul(e)));
    inputs += 2;
  }
  return {worst_a <= 1e-12 && worst_b <= 1e-12,
          fmt("%d random inputs per operator (1D and 2D perturbed meshes): a(.,.) %.2e, b(.,.) %.2e relative "
              "(need <= 1e-12)",
              inputs, worst_a, worst_b)};
}

// 10. Skin friction -----------------------------------------------------------------

Outcome skin_friction_check() {
  // analytic shear v = (y, 0), bottom wall
  const auto s = grid(2, 10, 6, false, false, 0.);
  const GasLaw law(1.4);
  Field<2> U(s.g.n);
  for (int i = 0; i < s.g.n; ++i) U[i] = from_primitive<2>({1.3, {s.mesh.node[i][1], 0.}, 1.}, law);
  const ViscousModel vm{0.01, 0., 0.02};
  const double rho_ref = 1.2, v_ref = 0.8;
  const double want = -vm.mu / (0.5 * rho_ref * v_ref * v_ref);
  double worst = 0.;
  for (const auto& w : skin_friction(U, s.mesh, vm, "bottom", rho_ref, v_ref))
    worst = std::max(worst, std::abs(w.value - want) / std::abs(want));
  const bool a_ok = worst <= 1e-12;

  // shocktube 512 x 256 to t = 1
  const auto t0 = std::chrono::steady_clock::now();
  auto c = default_config("shocktube");
  bool admissible = true;
  double xmin = -1., cfmin = 0.;
  long steps = 0;
  std::string error;
  try {
    Simulation<2> sim(c);
    while (!sim.finished()) {
      sim.step();
      if (sim.state().step % 200 == 0) progress(fmt("shocktube t = %.4f", sim.state().t));
    }
    steps = sim.state().step;
    for (const auto& u : sim.state().U) admissible = admissible && is_admissible<2>(u);
    const auto& sc = sim.scenario();
    const auto cf = skin_friction(sim.state().U, sc.mesh, sc.model, sc.cf_tag, sc.rho_ref, sc.v_ref);
    cfmin = 1e300;
    for (const auto& w : cf)
      if (w.value < cfmin) {
        cfmin = w.value;
        xmin = w.x[0];
      }
  } catch (const std::exception& e) {
    admissible = false;
    error = e.what();
  }
  const bool b_ok = admissible && xmin > 0.55 && xmin < 0.95;
  return {a_ok && b_ok, fmt("linear shear relative error %.2e (need <= 1e-12); shocktube 512x256 t = 1: %s, %ld steps, "
                            "C_f minimum %.4e at x = %.4f (need x in (0.55, 0.95)), %.0f s%s",
                            worst, admissible ? "admissible" : "FAILED", steps, cfmin, xmin, seconds_since(t0),
                            error.empty() ? "" : (" error: " + error).c_str())};
}

// 11. Determinism ---------------------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "idpflow_acceptance_11";
  std::filesystem::remove_all(root);
  std::string detail;
  bool ok = true;
  for (const auto& name : scenario_names()) {
    auto c = default_config(name);
    if (name == "vortex") c.t_final = 0.5;
    if (name == "becker") c.cells = {32, 32}, c.t_final = 0.2;
    if (name == "shocktube") c.cells = {64, 32}, c.t_final = 0.2;
    if (name == "box") c.cells = {16, 16}, c.t_final = 0.5;
    for (int threads : {1, 2}) {
      c.threads = threads;
      std::vector<std::string> csv;
      for (const char* run : {"a", "b"}) {
        c.output_dir = (root / (name + std::to_string(threads) + run)).string();
        run_scenario(c);
        std::string s = slurp(c.output_dir + "/timeseries.csv");
        if (std::filesystem::exists(c.output_dir + "/cf.csv")) s += slurp(c.output_dir + "/cf.csv");
        csv.push_back(s);
      }
      const bool same = csv[0] == csv[1] && !csv[0].empty();
      ok = ok && same;
      detail += fmt("%s/%dt %s; ", name.c_str(), threads, same ? "identical" : "DIFFERENT");
    }
  }
  set_thread_count(1);
  std::filesystem::remove_all(root);
  return {ok, detail + "CSV artifacts compared byte by byte"};
}

// 12. Thread scaling ---------------------------------------------------------------------

Outcome thread_scaling() {
  auto c = default_config("box");
  c.cells = {320, 320};
  const auto r = bench_scenario(c, {1, 8}, 3);
  const double eff = r["runs"][1]["hyperbolic_efficiency"].get<double>();
  const unsigned hw = std::thread::hardware_concurrency();
  Outcome o{eff >= 0.6,
            fmt("hyperbolic stage on %d nodes: %.4f s/step with 1 thread, %.4f s/step with 8, efficiency %.3f "
                "(need >= 0.6); %u hardware threads",
                r["nodes"].get<int>(), r["runs"][0]["hyperbolic_seconds"].get<double>(),
                r["runs"][1]["hyperbolic_seconds"].get<double>(), eff, hw)};
  if (!o.pass && hw < 8) {
    o.assessable = false;
    o.detail += ", fewer than 8 cores: not assessable here";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"Becker convergence", becker}},
      {2, {"wavespeed bound dominance", wavespeed}},
      {3, {"conservation after limiting", conservation_after_limiting}},
      {4, {"global conservation", global_conservation}},
      {5, {"invariant domain and local bounds", invariant_domain}},
      {6, {"Sod accuracy", sod_accuracy}},
      {7, {"non-reflecting vortex", vortex}},
      {8, {"parabolic step", parabolic}},
      {9, {"matrix-free fidelity", matrix_free}},
      {10, {"skin friction", skin_friction_check}},
      {11, {"determinism", determinism}},
      {12, {"thread scaling", thread_scaling}},
  };
  int status = 0;
  for (const auto& [id, c] : criteria) {
    if (only && id != only) continue;
    set_thread_count(1);
    Outcome o;
    try {
      o = c.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, c.first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) status = (o.assessable && status != 1) ? 1 : (status == 1 ? 1 : 77);
  }
  return status;
}
