#include "idpflow/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "idpflow/errors.hpp"
#include "idpflow/output.hpp"
#include "idpflow/parallel.hpp"
#include "idpflow/riemann.hpp"

namespace idpflow {

using nlohmann::json;

BeckerProfile::BeckerProfile(double mach, double rho0, double v0, double mu_eff, double gamma)
    : gamma_(gamma), rho0_(rho0), v0_(v0) {
  if (!(mach > 1.) || !(rho0 > 0.) || !(v0 > 0.) || !(mu_eff > 0.) || !(gamma > 1.))
    throw ConfigError("becker profile needs mach > 1, rho0 > 0, v0 > 0, mu > 0, gamma > 1");
  v1_ = v0 * (gamma - 1. + 2. / (mach * mach)) / (gamma + 1.);
  m0_ = rho0 * v0;
  p0_ = rho0 * v0 * v0 / (gamma * mach * mach);
  H0_ = gamma / (gamma - 1.) * p0_ / rho0 + 0.5 * v0 * v0;
  vm_ = 0.5 * (v0_ + v1_);
  scale_ = 2. * gamma * mu_eff / ((gamma + 1.) * m0_);
}

double BeckerProfile::position(double v) const {
  const double d = v0_ - v1_;
  return scale_ * (v0_ / d * std::log((v0_ - v) / (v0_ - vm_)) - v1_ / d * std::log((v - v1_) / (vm_ - v1_)));
}

double BeckerProfile::velocity(double x) const {
  double lo = v1_, hi = v0_;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    // position() decreases in v
    if (position(mid) > x)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

BeckerProfile::Sample BeckerProfile::at(double x) const {
  const double v = velocity(x);
  return {m0_ / v, v, (H0_ - 0.5 * v * v) / gamma_};
}

std::pair<double, double> vortex_preset(const std::string& name) {
  if (name == "i") return {0.5, 0.75};
  if (name == "ii") return {0.5, 0.25};
  if (name == "iii") return {0.05, 0.75};
  if (name == "iv") return {0.05, 0.25};
  throw ConfigError("unknown vortex case '" + name + "' (available: i, ii, iii, iv)");
}

int scenario_dim(const std::string& name) {
  default_config(name);
  return name == "sod" ? 1 : 2;
}

namespace {

double num(const json& p, const char* key) { return p.at(key).get<double>(); }

template <int dim>
State<dim> state_of(double rho, const Vec<dim>& v, double p, const GasLaw& law) {
  return from_primitive<dim>({rho, v, p}, law);
}

MeshSpec mesh_spec(const ScenarioConfig& c, int dim) {
  MeshSpec s;
  s.dim = dim;
  s.cells = {c.cells[0], dim == 1 ? 1 : c.cells[1]};
  s.perturbation = c.perturbation;
  s.seed = c.seed;
  if (c.scenario == "vortex") {
    s.lo = {-1., -1.};
    s.hi = {1., 1.};
  } else if (c.scenario == "shocktube") {
    s.hi = {1., 0.5};
  } else if (c.scenario == "becker") {
    s.periodic = {false, true};
  }
  return s;
}

/// Tag of the side a boundary point lies on (tags are the side names).
std::string side_of(const Mesh& mesh, const Point& x) {
  const double tol = 1e-12 * std::max(mesh.hi[0] - mesh.lo[0], mesh.hi[1] - mesh.lo[1]);
  if (std::abs(x[0] - mesh.lo[0]) <= tol) return "left";
  if (std::abs(x[0] - mesh.hi[0]) <= tol) return "right";
  if (std::abs(x[1] - mesh.lo[1]) <= tol) return "bottom";
  if (std::abs(x[1] - mesh.hi[1]) <= tol) return "top";
  return "";
}

}  // namespace

template <int dim>
Scenario<dim>::Scenario(const ScenarioConfig& c) : config(c), law(c.gamma) {
  validate(c);
  if (scenario_dim(c.scenario) != dim)
    throw ConfigError("scenario '" + c.scenario + "' is " + std::to_string(scenario_dim(c.scenario)) + "D");
  const auto& p = c.params;

  mesh = build_structured_mesh(mesh_spec(c, dim));
  cv = build_cell_values(mesh);
  g = assemble_graph(mesh, cv);

  FarField far;
  if (c.scenario == "sod") {
    const double x0 = num(p, "x0");
    const auto L = p.at("left").get<std::vector<double>>();
    const auto R = p.at("right").get<std::vector<double>>();
    const NormalData l{L[0], L[1], L[2]}, r{R[0], R[1], R[2]};
    if (!(l.rho > 0. && l.p > 0. && r.rho > 0. && r.p > 0.))
      throw ConfigError("config key 'params': sod states need positive density and pressure");
    const GasLaw gl = law;
    exact = [=](const Point& x, double t) {
      NormalData w = x[0] < x0 ? l : r;
      if (t > 0.) {
        const double xi = (x[0] - x0) / t;
        const NormalData ls{l.rho, l.vn - xi, l.p}, rs{r.rho, r.vn - xi, r.p};
        w = sample_at_zero(solve_exact(ls, rs, gl), ls, rs, gl);
        w.vn += xi;
      }
      Vec<dim> v{};
      v[0] = w.vn;
      return state_of<dim>(w.rho, v, w.p, gl);
    };
  } else if (c.scenario == "becker") {
    if (!c.viscous) throw ConfigError("config key 'viscous': becker needs the viscous step");
    const double mu_eff = 4. / 3. * c.mu + c.lambda;
    if (std::abs(c.kappa_over_cv - c.gamma * mu_eff) > 1e-12 * c.gamma * mu_eff)
      throw ConfigError("config key 'kappa_over_cv': the becker profile needs kappa_over_cv = gamma (4/3 mu + lambda)");
    const BeckerProfile prof(num(p, "mach"), num(p, "rho0"), num(p, "v0"), mu_eff, c.gamma);
    const double vg = num(p, "v_galilean"), x0 = num(p, "x0");
    const GasLaw gl = law;
    exact = [=](const Point& x, double t) {
      const auto s = prof.at(x[0] - x0 - vg * t);
      Vec<dim> v{};
      v[0] = s.v + vg;
      return state_of<dim>(s.rho, v, gl.gm1() * s.rho * s.e, gl);
    };
  } else if (c.scenario == "vortex") {
    const double M = num(p, "mach"), vbar = num(p, "vbar"), r0 = num(p, "r0");
    const double vinf = num(p, "v_inf"), rinf = num(p, "rho_inf");
    const auto x0 = p.at("center").get<std::vector<double>>();
    if (!(M > 0.) || !(r0 > 0.) || !(vinf > 0.) || !(rinf > 0.))
      throw ConfigError("config key 'params': vortex needs positive mach, r0, v_inf, rho_inf");
    const double pinf = rinf / c.gamma * (vinf / M) * (vinf / M);
    vortex = true;
    v_inf[0] = vinf;
    const GasLaw gl = law;
    const auto vi = v_inf;
    far = [=](const Point&, double, double* u) {
      const auto s = state_of<dim>(rinf, vi, pinf, gl);
      for (int k = 0; k < dim + 2; ++k) u[k] = s[k];
    };
    U0.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
      const auto& x = mesh.node[i];
      const double dx = x[0] - x0[0], dy = x[1] - x0[1];
      const double psi = std::exp(0.5 * (1. - (dx * dx + dy * dy) / (r0 * r0)));
      Vec<dim> v = v_inf;
      v[0] += vbar / r0 * psi * -dy;
      v[1] += vbar / r0 * psi * dx;
      U0[i] = state_of<dim>(rinf, v, pinf - 0.5 * rinf * vbar * vbar * psi * psi, law);
    }
  } else if (c.scenario == "shocktube") {
    const double rl = num(p, "rho_left"), rr = num(p, "rho_right"), x0 = num(p, "x0");
    if (!(rl > 0.) || !(rr > 0.)) throw ConfigError("config key 'params': shocktube densities must be positive");
    rho_ref = num(p, "rho_ref");
    v_ref = num(p, "v_ref");
    cf_tag = p.at("cf_tag").get<std::string>();
    U0.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
      const double rho = mesh.node[i][0] < x0 ? rl : rr;
      U0[i] = state_of<dim>(rho, Vec<dim>{}, rho / c.gamma, law);
    }
  } else if (c.scenario == "box") {
    const double a = num(p, "amplitude");
    const double pi = std::acos(-1.);
    U0.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
      const auto& x = mesh.node[i];
      Vec<dim> v{};
      v[0] = a * std::sin(pi * x[0]) * std::cos(pi * x[1]);
      v[1] = -a * std::cos(pi * x[0]) * std::sin(pi * x[1]);
      const double rho = 1. + 0.5 * std::sin(pi * x[0]) * std::sin(pi * x[1]);
      U0[i] = state_of<dim>(rho, v, 1. + 0.25 * std::cos(pi * x[0]), law);
    }
  }

  if (exact) {
    const auto ex = exact;
    far = [ex](const Point& x, double t, double* u) {
      const auto s = ex(x, t);
      for (int k = 0; k < dim + 2; ++k) u[k] = s[k];
    };
    U0.resize(g.n);
    for (int i = 0; i < g.n; ++i) U0[i] = exact(mesh.node[i], 0.);
  }

  std::map<std::string, BoundaryKind> table;
  for (const auto& [tag, kind] : c.euler_bc) table[tag] = boundary_kind_from_string(kind);
  for (const auto& tag : mesh.tags)
    if (!table.count(tag)) throw ConfigError("config key 'euler_bc': no boundary condition for tag '" + tag + "'");
  for (const auto& [tag, kind] : table)
    if (std::find(mesh.tags.begin(), mesh.tags.end(), tag) == mesh.tags.end())
      throw ConfigError("config key 'euler_bc." + tag + "': the mesh has no such boundary");
  bm = assemble_boundary_map(mesh, table, far);

  viscous = c.viscous;
  if (viscous) {
    model = {c.mu, c.lambda, c.kappa_over_cv};
    for (const auto& [tag, kind] : c.velocity_bc) pbc.velocity[tag] = velocity_bc_from_string(kind);
    std::map<std::string, double> dirichlet;
    for (const auto& [tag, v] : c.temperature_bc) {
      pbc.temperature[tag] = v ? TemperatureBC::dirichlet : TemperatureBC::neumann;
      if (v) dirichlet[tag] = *v;
    }
    if (!dirichlet.empty()) {
      const Mesh* m = &mesh;
      pbc.boundary_energy = [m, dirichlet](const Point& x, double) {
        const auto it = dirichlet.find(side_of(*m, x));
        if (it != dirichlet.end()) return it->second;
        // corner shared with a Neumann side: any Dirichlet value on it
        return dirichlet.begin()->second;
      };
    }
  } else if (!cf_tag.empty()) {
    cf_tag.clear();
  }

  for (int i = 0; i < g.n; ++i) require_admissible<dim>(U0[i], "initial state");
}

template <int dim>
Simulation<dim>::Simulation(const ScenarioConfig& c) : sc_(std::make_unique<Scenario<dim>>(c)) {
  HyperbolicOptions ho;
  ho.cfl = c.cfl;
  ho.limiter_passes = c.limiter_passes;
  ho.indicator = indicator_kind_from_string(c.indicator);
  ho.entropy = entropy_kind_from_string(c.entropy);
  ho.nonreflecting = nonreflecting_method_from_string(c.nonreflecting);
  ho.relax_bounds = c.relax_bounds;
  ho.adaptive_cfl = c.adaptive_cfl;
  ho.check_bounds = c.check_bounds;
  hyp_ = std::make_unique<HyperbolicSolver<dim>>(sc_->g, sc_->law, ho);
  if (sc_->viscous)
    par_ = std::make_unique<ParabolicSolver<dim>>(sc_->mesh, sc_->cv, sc_->g, sc_->law, sc_->model, sc_->pbc,
                                                  CgOptions{c.cg_tol, c.cg_max_iter});
  DriverOptions dopt;
  dopt.t_final = c.t_final;
  dopt.max_steps = c.max_steps;
  drv_ = std::make_unique<SplittingDriver<dim>>(*hyp_, par_.get(), &sc_->bm, dopt, sc_->force);
  run_ = drv_->start(sc_->U0, 0.);
}

template <int dim>
ExactSolution<dim> Simulation<dim>::exact_now() const {
  if (!sc_->exact) return {};
  const auto ex = sc_->exact;
  const double t = run_.t;
  return [ex, t](const Point& x) { return ex(x, t); };
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <int dim>
void write_snapshot(const std::string& path, const Scenario<dim>& sc, const Field<dim>& U) {
  std::vector<std::pair<std::string, std::vector<double>>> data;
  const char* mnames[] = {"m_x", "m_y"};
  data.push_back({"rho", {}});
  for (int k = 0; k < dim; ++k) data.push_back({mnames[k], {}});
  data.push_back({"E", {}});
  data.push_back({"p", {}});
  for (const auto& u : U) {
    for (int k = 0; k < dim + 2; ++k) data[k].second.push_back(u[k]);
    data[dim + 2].second.push_back(pressure_raw<dim>(u, sc.law));
  }
  data.push_back({"schlieren", schlieren<dim>(U, sc.g)});
  write_vtk(path, sc.mesh, data);
}

template <int dim>
json run_impl(const ScenarioConfig& c) {
  const auto wall0 = std::chrono::steady_clock::now();
  set_thread_count(c.threads);
  ensure_directory(c.output_dir);
  Simulation<dim> sim(c);
  const auto& sc = sim.scenario();
  auto& run = sim.state();

  double curl0 = 0.;
  VortexDiagnostics vd0, vmax;
  if constexpr (dim == 2) {
    if (sc.vortex) {
      curl0 = max_vorticity(sim.state().U, sc.g);
      vd0 = vortex_diagnostics(run.U, sc.g, sc.v_inf, curl0);
      vmax = vd0;
    }
  }

  std::vector<std::string> cols = {"step", "t", "tau", "mass"};
  const char* mcols[] = {"momentum_x", "momentum_y"};
  for (int k = 0; k < dim; ++k) cols.push_back(mcols[k]);
  cols.insert(cols.end(), {"energy", "ledger_residual", "max_residual", "fct", "cg_iterations", "retries"});
  if (sc.vortex) cols.insert(cols.end(), {"delta1", "delta2"});
  CsvWriter csv(join_path(c.output_dir, "timeseries.csv"), cols);
  auto emit = [&](const StepInfo& info, const VortexDiagnostics& vd) {
    const auto tot = total<dim>(run.U, sc.g);
    std::vector<double> row = {double(run.step), run.t, info.tau};
    for (int k = 0; k < dim + 2; ++k) row.push_back(tot[k]);
    row.insert(row.end(), {info.ledger_residual, info.max_residual, info.fct ? 1. : 0., double(info.cg_iterations),
                           double(info.retries)});
    if (sc.vortex) row.insert(row.end(), {vd.delta1, vd.delta2});
    csv.row(row);
  };
  emit(StepInfo{}, vd0);

  double hyp_s = 0., par_s = 0., ledger_max = 0., residual_max = 0.;
  long fct_steps = 0, retries = 0, cg_total = 0;
  int snapshot = 0;
  while (!sim.finished()) {
    const auto info = sim.step();
    hyp_s += info.hyperbolic_seconds;
    par_s += info.parabolic_seconds;
    ledger_max = std::max(ledger_max, info.ledger_residual);
    residual_max = std::max(residual_max, info.max_residual);
    fct_steps += info.fct;
    retries += info.retries;
    cg_total += info.cg_iterations;
    VortexDiagnostics vd;
    if constexpr (dim == 2) {
      if (sc.vortex) {
        vd = vortex_diagnostics(run.U, sc.g, sc.v_inf, curl0);
        vmax.delta1 = std::max(vmax.delta1, vd.delta1);
        vmax.delta2 = std::max(vmax.delta2, vd.delta2);
      }
    }
    if (run.step % c.csv_every == 0 || sim.finished()) emit(info, vd);
    if (c.vtk_every > 0 && run.step % c.vtk_every == 0) {
      char name[40];
      std::snprintf(name, sizeof name, "snapshot_%06d.vtk", ++snapshot);
      write_snapshot(join_path(c.output_dir, name), sc, run.U);
    }
  }
  csv.flush();
  write_snapshot(join_path(c.output_dir, "final.vtk"), sc, run.U);

  json s;
  s["scenario"] = c.scenario;
  s["dim"] = dim;
  s["nodes"] = sc.g.n;
  s["steps"] = run.step;
  s["t"] = run.t;
  s["completed"] = run.t >= c.t_final;
  const auto tot = total<dim>(run.U, sc.g);
  s["final_mass"] = tot[0];
  s["final_energy"] = tot[dim + 1];
  s["ledger_residual_max"] = ledger_max;
  s["stage_residual_max"] = residual_max;
  s["fct_steps"] = fct_steps;
  s["cfl_retries"] = retries;
  s["cg_iterations"] = cg_total;
  if (!run.tau_history.empty()) {
    const auto [lo, hi] = std::minmax_element(run.tau_history.begin(), run.tau_history.end());
    double sum = 0.;
    for (double t : run.tau_history) sum += t;
    s["tau"] = {{"min", *lo}, {"max", *hi}, {"mean", sum / run.tau_history.size()}};
  }
  if (const auto ex = sim.exact_now()) {
    const auto e = error_norms<dim>(run.U, sc.mesh, sc.g, ex);
    s["delta_1"] = e.l1;
    s["delta_2"] = e.l2;
    s["delta_inf"] = e.linf;
    s["density_l1"] = density_l1_error<dim>(run.U, sc.mesh, sc.g, ex);
  }
  if (sc.vortex)
    s["vortex"] = {{"curl0", curl0},          {"delta1_final", 0.}, {"delta2_final", 0.},
                   {"delta1_max", vmax.delta1}, {"delta2_max", vmax.delta2}};
  if constexpr (dim == 2) {
    if (sc.vortex) {
      const auto vd = vortex_diagnostics(run.U, sc.g, sc.v_inf, curl0);
      s["vortex"]["delta1_final"] = vd.delta1;
      s["vortex"]["delta2_final"] = vd.delta2;
    }
    if (!sc.cf_tag.empty()) {
      const auto cf = skin_friction(run.U, sc.mesh, sc.model, sc.cf_tag, sc.rho_ref, sc.v_ref);
      CsvWriter out(join_path(c.output_dir, "cf.csv"), {"x", "y", "cf"});
      for (const auto& w : cf) out.row({w.x[0], w.x[1], w.value});
      const auto it = std::min_element(cf.begin(), cf.end(),
                                       [](const WallSample& a, const WallSample& b) { return a.value < b.value; });
      if (it != cf.end()) s["cf_min"] = {{"x", it->x[0]}, {"value", it->value}};
    }
  }
  const double wall = seconds_since(wall0);
  s["timing"] = {{"threads", thread_count()},
                 {"wall_seconds", wall},
                 {"hyperbolic_seconds", hyp_s},
                 {"parabolic_seconds", par_s},
                 {"seconds_per_step", run.step > 0 ? wall / run.step : 0.}};
  s["config"] = to_json(c);
  write_json_file(join_path(c.output_dir, "summary.json"), s);
  return s;
}

template <int dim>
json bench_impl(const ScenarioConfig& c, const std::vector<int>& threads, int steps) {
  const int saved = thread_count();
  json rows = json::array();
  double hyp1 = 0.;
  int nodes = 0;
  for (int n : threads) {
    set_thread_count(n);
    Simulation<dim> sim(c);
    nodes = sim.scenario().g.n;
    double hyp = 0., par = 0., wall = 0.;
    int k = 0;
    for (; k < steps && !sim.finished(); ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto info = sim.step();
      wall += seconds_since(t0);
      hyp += info.hyperbolic_seconds;
      par += info.parabolic_seconds;
    }
    if (k == 0) throw ConfigError("bench: the scenario finished before the first step");
    if (rows.empty()) hyp1 = hyp / k;
    const double hps = hyp / k;
    rows.push_back({{"threads", n},
                    {"steps", k},
                    {"step_seconds", wall / k},
                    {"hyperbolic_seconds", hps},
                    {"parabolic_seconds", par / k},
                    {"hyperbolic_speedup", hyp1 / hps},
                    {"hyperbolic_efficiency", hyp1 / hps / (double(n) / threads.front())}});
  }
  set_thread_count(saved);
  return {{"scenario", c.scenario}, {"nodes", nodes}, {"runs", rows}};
}

}  // namespace

json run_scenario(const ScenarioConfig& config) {
  return scenario_dim(config.scenario) == 1 ? run_impl<1>(config) : run_impl<2>(config);
}

json bench_scenario(const ScenarioConfig& config, const std::vector<int>& threads, int steps) {
  if (threads.empty() || steps < 1) throw ConfigError("bench needs thread counts and steps >= 1");
  for (int n : threads)
    if (n < 1) throw ConfigError("bench thread counts must be >= 1");
  return scenario_dim(config.scenario) == 1 ? bench_impl<1>(config, threads, steps)
                                            : bench_impl<2>(config, threads, steps);
}

template struct Scenario<1>;
template struct Scenario<2>;
template class Simulation<1>;
template class Simulation<2>;

}  // namespace idpflow
