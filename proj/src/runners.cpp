#include "qheat/runners.hpp"

#include <json.hpp>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qheat::runners {

using json = nlohmann::json;
using master_eq::Flavor;
using master_eq::Reference;

namespace {

bath::BathSpec to_bath(const config::BathParams& p, double temperature) {
  bath::BathSpec b;
  b.sd.lambda = p.lambda;
  b.sd.cutoff = p.cutoff;
  b.temperature = temperature;
  return b;
}

Mat prune(Mat m, double rel_tol = 1e-12) {
  const double cut = rel_tol * m.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) < cut) m(i, j) = cplx(0.0, 0.0);
  return m;
}

Mat initial_state_matrix(const RunConfig& cfg, const models::SystemModel& model,
                         double t1) {
  const std::string& which = cfg.initial_state;
  if (model.name == "spin_boson") {
    if (which == "default" || which == "plus") return models::plus_state();
    if (which == "vacuum") {
      Mat r = Mat::Zero(2, 2);
      r(1, 1) = 1.0;  // ground state of H0
      return r;
    }
    if (which == "gibbs") return ops::gibbs_state(model.h_phys(), t1);
  } else {
    if (which == "default" || which == "vacuum") {
      Mat r = Mat::Zero(model.dim(), model.dim());
      r(0, 0) = 1.0;
      return r;
    }
    if (which == "gibbs") return ops::gibbs_state(model.h_phys(), t1);
  }
  throw config::ConfigError("initial_state '" + which + "' not valid for model " +
                            model.name);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

models::SystemModel build_model(const RunConfig& cfg) {
  return build_model(cfg, cfg.bath1.temperature, cfg.bath2.temperature);
}

models::SystemModel build_model(const RunConfig& cfg, double t1, double t2) {
  const std::array<bath::BathSpec, 2> baths = {to_bath(cfg.bath1, t1),
                                               to_bath(cfg.bath2, t2)};
  if (cfg.model == "oscillator")
    return models::oscillator_model(cfg.omega0, cfg.fock_dim, baths, cfg.counter_term);
  return models::spin_boson_model(cfg.epsilon0, baths, cfg.counter_term,
                                  cfg.spin_identity_coupling);
}

exact_osc::OscillatorSpec osc_spec(const RunConfig& cfg, double t1, double t2) {
  exact_osc::OscillatorSpec spec;
  spec.omega0 = cfg.omega0;
  spec.baths = {to_bath(cfg.bath1, t1), to_bath(cfg.bath2, t2)};
  spec.counter_term = cfg.counter_term;
  return spec;
}

double analytic_osc_gkls_current(const RunConfig& cfg, double t1, double t2,
                                 Reference ref) {
  if (cfg.model != "oscillator")
    throw std::invalid_argument("analytic_osc_gkls_current: oscillator only");
  const auto spec = osc_spec(cfg, t1, t2);
  const double w = ref == Reference::conventional
                       ? std::sqrt(exact_osc::omega_r_squared(spec))
                       : cfg.omega0;
  const double j1 = bath::j_omega(spec.baths[0].sd, w);
  const double j2 = bath::j_omega(spec.baths[1].sd, w);
  if (j1 + j2 == 0.0) return 0.0;
  const double n1 = bath::occupation(t1, w);
  const double n2 = bath::occupation(t2, w);
  return j1 * j2 * (n1 - n2) / (j1 + j2);
}

int converged_fock_dim(const RunConfig& cfg, double t1, double t2, int start, int step,
                       double rel_tol, int cap) {
  if (cfg.model != "oscillator")
    throw std::invalid_argument("converged_fock_dim: oscillator only");
  auto observe = [&](int dim) {
    RunConfig c = cfg;
    c.fock_dim = dim;
    const auto model = build_model(c, t1, t2);
    const Mat x2 = models::oscillator_ops(cfg.omega0, dim).x2;
    std::array<double, 4> obs{};
    int k = 0;
    for (Reference ref : {Reference::reorganised, Reference::conventional}) {
      const auto me = master_eq::build_for_model(model, ref, Flavor::secular_gkls,
                                                 cfg.build_options());
      const auto ss = master_eq::steady_state(me);
      obs[k++] = thermo::heat_current(me, ss.rho, 0);
      obs[k++] = ops::expectation(x2, ss.rho);
    }
    return obs;
  };
  int dim = start;
  auto prev = observe(dim);
  while (dim + step <= cap) {
    const auto next = observe(dim + step);
    double worst = 0.0;
    for (int k = 0; k < 4; ++k)
      worst = std::max(worst,
                       std::abs(next[k] - prev[k]) / std::max(std::abs(next[k]), 1e-300));
    if (worst < rel_tol) return dim;
    dim += step;
    prev = next;
  }
  return cap;
}

HeomRun make_heom_run(const RunConfig& cfg, double t1, double t2,
                      const heom::HeomConfig& hcfg) {
  const auto model = build_model(cfg, t1, t2);
  std::vector<bath::ExponentialSeries> series;
  std::vector<Mat> couplings;
  for (const auto& c : model.couplings) {
    series.push_back(bath::correlation_series(c.bath, hcfg.n_matsubara));
    couplings.push_back(c.op);
  }
  const Mat h = model.h_phys();
  Mat rho0 = initial_state_matrix(cfg, model, t1);

  if (cfg.model == "oscillator") {
    // hierarchy in the eigenbasis of H_S: the diagonal [H, .] improves the
    // iterative steady-state solver and keeps x tridiagonal
    const auto eig = ops::eig_hermitian(h);
    const Mat& v = eig.vectors;
    Mat h_diag = Mat::Zero(h.rows(), h.cols());
    h_diag.diagonal() = eig.values.cast<cplx>();
    for (auto& s : couplings) s = prune(v.adjoint() * s * v);
    const Mat x2 = models::oscillator_ops(cfg.omega0, cfg.fock_dim).x2;
    return HeomRun{heom::Hierarchy(h_diag, couplings, series, hcfg), v,
                   Mat(v.adjoint() * x2 * v), Mat(v.adjoint() * rho0 * v)};
  }
  return HeomRun{heom::Hierarchy(h, couplings, series, hcfg), Mat::Identity(2, 2),
                 Mat(), rho0};
}

HeomSteadyObs heom_steady_observables(const RunConfig& cfg, double t1, double t2,
                                      const heom::HeomConfig& hcfg) {
  const HeomRun run = make_heom_run(cfg, t1, t2, hcfg);
  const auto ss = heom::steady_state(run.hierarchy);
  HeomSteadyObs obs;
  obs.current_b1 = run.hierarchy.current(ss.state, 0);
  obs.current_b2 = run.hierarchy.current(ss.state, 1);
  obs.x2 = run.x2.size() > 0 ? ops::expectation(run.x2, ss.rho) : 0.0;
  obs.balance = std::abs(obs.current_b1 + obs.current_b2);
  obs.residual = ss.residual;
  obs.method = ss.method;
  return obs;
}

double exact_current(const RunConfig& cfg, double t1, double t2,
                     const heom::HeomConfig& hcfg, int bath_index) {
  if (cfg.model == "oscillator")
    return exact_osc::exact_current(osc_spec(cfg, t1, t2), bath_index);
  const auto obs = heom_steady_observables(cfg, t1, t2, hcfg);
  return bath_index == 0 ? obs.current_b1 : obs.current_b2;
}

namespace {

CurrentsRow make_row(double t1, double t2, const std::string& method,
                     const std::string& reference, const thermo::CurrentReport& rep,
                     double exact_q1) {
  CurrentsRow row;
  row.t1 = t1;
  row.t2 = t2;
  row.method = method;
  row.reference = reference;
  row.q1 = rep.per_bath.at(0);
  row.q2 = rep.per_bath.at(1);
  row.clausius_sum = rep.clausius_sum;
  row.balance_residual = rep.balance_residual;
  row.exact_q1 = exact_q1;
  row.rel_error = std::abs(exact_q1) > 1e-30
                      ? std::abs(row.q1 - exact_q1) / std::abs(exact_q1)
                      : std::abs(row.q1 - exact_q1);
  return row;
}

}  // namespace

std::vector<CurrentsRow> run_current_point(const RunConfig& cfg, double t1, double t2) {
  const auto model = build_model(cfg, t1, t2);
  const double exact_q1 = exact_current(cfg, t1, t2, cfg.heom, 0);
  std::vector<CurrentsRow> rows;
  for (Reference ref : cfg.reference_list())
    for (Flavor flavor : cfg.flavor_list()) {
      const auto rep = thermo::steady_currents(model, ref, flavor, cfg.build_options());
      rows.push_back(make_row(t1, t2, master_eq::to_string(flavor),
                              master_eq::to_string(ref), rep, exact_q1));
    }
  CurrentsRow oracle;
  oracle.t1 = t1;
  oracle.t2 = t2;
  oracle.method = "exact";
  oracle.reference = "none";
  oracle.q1 = exact_q1;
  oracle.q2 = cfg.model == "oscillator" ? exact_current(cfg, t1, t2, cfg.heom, 1)
                                        : -exact_q1;
  oracle.clausius_sum = exact_q1 / t1 + oracle.q2 / t2;
  oracle.balance_residual = std::abs(oracle.q1 + oracle.q2);
  oracle.exact_q1 = exact_q1;
  oracle.rel_error = 0.0;
  rows.push_back(oracle);
  return rows;
}

std::vector<CurrentsRow> run_current_sweep(const RunConfig& cfg) {
  RunConfig c = cfg;
  struct Point {
    double t1, t2;
  };
  std::vector<Point> pts;
  const auto t1v = linspace(cfg.t1_min, cfg.t1_max, cfg.t1_points);
  if (cfg.t2_ratio > 0.0) {
    for (double t1 : t1v) pts.push_back({t1, cfg.t2_ratio * t1});
  } else {
    const auto t2v = linspace(cfg.t2_min, cfg.t2_max, cfg.t2_points);
    for (double t1 : t1v)
      for (double t2 : t2v) pts.push_back({t1, t2});
  }
  if (cfg.exclude_diagonal) {
    std::erase_if(pts, [](const Point& p) {
      return std::abs(p.t1 - p.t2) < 1e-12 * std::max(1.0, std::abs(p.t1));
    });
  }

  if (cfg.model == "oscillator") {
    // one truncation for the whole sweep, converged at the hottest corner
    double t1h = 0.0, t2h = 0.0;
    for (const auto& p : pts) {
      t1h = std::max(t1h, p.t1);
      t2h = std::max(t2h, p.t2);
    }
    c.fock_dim = converged_fock_dim(c, t1h, t2h, cfg.fock_dim);
  }
  if (!cfg.sweep_include_redfield) c.flavors = "gkls";

  std::vector<std::vector<CurrentsRow>> per_point(pts.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < pts.size(); ++i) {
    try {
      per_point[i] = run_current_point(c, pts[i].t1, pts[i].t2);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  std::vector<CurrentsRow> rows;
  for (auto& v : per_point) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

DynamicsTable run_dynamics(const RunConfig& cfg) {
  const auto model = build_model(cfg);
  const double t1 = cfg.bath1.temperature;
  const auto t_grid = linspace(0.0, cfg.t_max, cfg.n_times);
  const Mat rho0 = initial_state_matrix(cfg, model, t1);

  const bool is_osc = cfg.model == "oscillator";
  const Mat x2 =
      is_osc ? models::oscillator_ops(cfg.omega0, cfg.fock_dim).x2 : Mat();

  struct Series {
    std::string tag;
    std::vector<Mat> states;
  };
  std::vector<Series> series;

  for (Reference ref : {Reference::reorganised, Reference::conventional}) {
    const auto me =
        master_eq::build_for_model(model, ref, Flavor::secular_gkls, cfg.build_options());
    auto prop = master_eq::propagate(me, rho0, t_grid);
    series.push_back({"gkls_" + master_eq::to_string(ref), std::move(prop.states)});
  }
  if (cfg.dynamics_include_redfield) {
    const auto me = master_eq::build_for_model(model, Reference::reorganised,
                                               Flavor::redfield, cfg.build_options());
    auto prop = master_eq::propagate(me, rho0, t_grid);
    series.push_back({"redfield_reorganised", std::move(prop.states)});
  }
  if (cfg.dynamics_include_heom) {
    const HeomRun run = make_heom_run(cfg, t1, cfg.bath2.temperature, cfg.heom);
    auto dyn = heom::propagate(run.hierarchy, run.rho0, t_grid);
    // transform back to the model basis
    std::vector<Mat> states;
    states.reserve(dyn.states.size());
    for (const auto& s : dyn.states) states.push_back(run.basis * s * run.basis.adjoint());
    series.push_back({"heom", std::move(states)});
  }

  DynamicsTable table;
  table.columns.push_back("t");
  const std::vector<std::string> obs_names =
      is_osc ? std::vector<std::string>{"x2"} : std::vector<std::string>{"pe", "recoh"};
  for (const auto& o : obs_names)
    for (const auto& s : series) table.columns.push_back(o + "_" + s.tag);

  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    std::vector<double> row;
    row.push_back(t_grid[k]);
    for (const auto& o : obs_names)
      for (const auto& s : series) {
        const Mat& rho = s.states[k];
        if (o == "x2") row.push_back(ops::expectation(x2, rho));
        else if (o == "pe") row.push_back(std::real(rho(0, 0)));
        else row.push_back(std::real(rho(0, 1)));
      }
    table.rows.push_back(std::move(row));
  }
  return table;
}

heom::ConvergenceReport run_heom_convergence(const RunConfig& cfg) {
  const double t1 = cfg.bath1.temperature;
  const double t2 = cfg.bath2.temperature;
  auto observable = [&](const heom::HeomConfig& h) {
    return heom_steady_observables(cfg, t1, t2, h).current_b1;
  };
  return heom::convergence_sweep(observable, cfg.heom);
}

// ---------------------------------------------------------------------------
// golden values

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

RunConfig fig1_osc_config() {
  RunConfig c;
  c.model = "oscillator";
  c.omega0 = 1.0;
  c.fock_dim = 30;
  c.bath1 = {0.01, 100.0, 1.0};
  c.bath2 = {0.005, 100.0, 1.5};
  return c;
}

RunConfig fig3_spin_config() {
  RunConfig c;
  c.model = "spin_boson";
  c.epsilon0 = 1.0;
  c.bath1 = {3e-3, 100.0, 1.0};
  c.bath2 = {1e-3, 100.0, 1.2};
  return c;
}

json convergence_to_json(const heom::ConvergenceReport& rep) {
  json out = json::array();
  for (const auto& e : rep.entries)
    out.push_back({{"which", e.which},
                   {"n_matsubara", e.n_matsubara},
                   {"depth", e.depth},
                   {"value", e.value},
                   {"rel_change", e.rel_change}});
  return out;
}

double recompute_entry(const json& e) {
  const std::string kind = e.at("kind");
  const json& p = e.at("params");
  if (kind == "exact_osc_current" || kind == "exact_osc_x2") {
    exact_osc::OscillatorSpec spec;
    spec.omega0 = p.at("omega0");
    spec.baths[0] = {{p.at("lambda1"), p.at("cutoff")}, p.at("t1")};
    spec.baths[1] = {{p.at("lambda2"), p.at("cutoff")}, p.at("t2")};
    return kind == "exact_osc_current" ? exact_osc::exact_current(spec, p.at("bath"))
                                       : exact_osc::exact_position_variance(spec);
  }
  if (kind == "heom_current" || kind == "heom_x2") {
    RunConfig c;
    c.model = p.at("model");
    if (c.model == "oscillator") {
      c.omega0 = p.at("omega0");
      c.fock_dim = p.at("fock_dim");
    } else {
      c.epsilon0 = p.at("epsilon0");
    }
    c.bath1 = {p.at("lambda1"), p.at("cutoff"), p.at("t1")};
    c.bath2 = {p.at("lambda2"), p.at("cutoff"), p.at("t2")};
    heom::HeomConfig h;
    h.n_matsubara = p.at("n_matsubara");
    h.depth = p.at("depth");
    h.terminator = p.at("terminator");
    const auto obs = heom_steady_observables(c, p.at("t1"), p.at("t2"), h);
    return kind == "heom_current"
               ? (p.at("bath") == 0 ? obs.current_b1 : obs.current_b2)
               : obs.x2;
  }
  if (kind == "gkls_current") {
    RunConfig c;
    c.model = p.at("model");
    if (c.model == "oscillator") {
      c.omega0 = p.at("omega0");
      c.fock_dim = p.at("fock_dim");
    } else {
      c.epsilon0 = p.at("epsilon0");
    }
    c.bath1 = {p.at("lambda1"), p.at("cutoff"), p.at("t1")};
    c.bath2 = {p.at("lambda2"), p.at("cutoff"), p.at("t2")};
    const auto model = build_model(c, p.at("t1"), p.at("t2"));
    const std::string ref = p.at("reference");
    const auto rep = thermo::steady_currents(
        model, ref == "reorganised" ? Reference::reorganised : Reference::conventional,
        Flavor::secular_gkls);
    return rep.per_bath.at(p.at("bath").get<int>());
  }
  throw std::runtime_error("regression: unknown golden entry kind '" + kind + "'");
}

}  // namespace

void write_golden(const std::string& path) {
  json golden;
  golden["schema"] = "qheat-golden-v1";
  json entries = json::array();

  // exact oscillator currents on the inset temperature line
  for (double t : {0.5, 1.0, 2.0}) {
    RunConfig c = fig1_osc_config();
    exact_osc::OscillatorSpec spec = osc_spec(c, t, 1.2 * t);
    json e;
    e["name"] = "exact_osc_current_T" + format_g17(t);
    e["kind"] = "exact_osc_current";
    e["params"] = {{"omega0", 1.0}, {"lambda1", 0.01}, {"lambda2", 0.005},
                   {"cutoff", 100.0}, {"t1", t}, {"t2", 1.2 * t}, {"bath", 0}};
    e["value"] = exact_osc::exact_current(spec, 0);
    e["rel_tol"] = 1e-7;
    entries.push_back(e);
  }

  {  // exact steady-state position variance at the Fig.-1 point
    RunConfig c = fig1_osc_config();
    const auto spec = osc_spec(c, 1.0, 1.5);
    json e;
    e["name"] = "exact_osc_x2";
    e["kind"] = "exact_osc_x2";
    e["params"] = {{"omega0", 1.0}, {"lambda1", 0.01}, {"lambda2", 0.005},
                   {"cutoff", 100.0}, {"t1", 1.0}, {"t2", 1.5}, {"bath", 0}};
    e["value"] = exact_osc::exact_position_variance(spec);
    e["rel_tol"] = 1e-7;
    entries.push_back(e);
  }

  {  // HEOM oscillator current at the pinned dual-oracle point
    RunConfig c = fig1_osc_config();
    c.fock_dim = 30;
    heom::HeomConfig h;
    h.n_matsubara = 4;
    h.depth = 3;
    auto observable = [&](const heom::HeomConfig& hc) {
      return heom_steady_observables(c, 1.0, 1.5, hc).current_b1;
    };
    const auto rep = heom::convergence_sweep(observable, h);
    const auto obs = heom_steady_observables(c, 1.0, 1.5, h);
    const double exact = exact_osc::exact_current(osc_spec(c, 1.0, 1.5), 0);

    json e;
    e["name"] = "osc_heom_current_T1_1_T2_1.5";
    e["kind"] = "heom_current";
    e["params"] = {{"model", "oscillator"}, {"omega0", 1.0}, {"fock_dim", 30},
                   {"lambda1", 0.01}, {"lambda2", 0.005}, {"cutoff", 100.0},
                   {"t1", 1.0}, {"t2", 1.5}, {"bath", 0},
                   {"n_matsubara", h.n_matsubara}, {"depth", h.depth},
                   {"terminator", h.terminator}};
    e["value"] = rep.entries.front().value;
    e["rel_tol"] = 1e-6;
    e["convergence"] = convergence_to_json(rep);
    e["converged"] = rep.converged;
    e["cross"] = {{"name", "exact_osc_current"}, {"value", exact}, {"rel_tol", 0.02}};
    entries.push_back(e);

    json ex;
    ex["name"] = "osc_heom_x2_T1_1_T2_1.5";
    ex["kind"] = "heom_x2";
    ex["params"] = e["params"];
    ex["value"] = obs.x2;
    ex["rel_tol"] = 1e-6;
    ex["cross"] = {{"name", "exact_osc_x2"},
                   {"value", exact_osc::exact_position_variance(osc_spec(c, 1.0, 1.5))},
                   {"rel_tol", 0.01}};
    entries.push_back(ex);
  }

  // spin-boson currents along the Fig.-3 temperature line
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    RunConfig c = fig3_spin_config();
    heom::HeomConfig h;
    h.n_matsubara = 8;
    h.depth = 4;
    auto observable = [&](const heom::HeomConfig& hc) {
      return heom_steady_observables(c, t, 1.2 * t, hc).current_b1;
    };
    const auto rep = heom::convergence_sweep(observable, h);
    json e;
    e["name"] = "spin_heom_current_T" + format_g17(t);
    e["kind"] = "heom_current";
    e["params"] = {{"model", "spin_boson"}, {"epsilon0", 1.0},
                   {"lambda1", 3e-3}, {"lambda2", 1e-3}, {"cutoff", 100.0},
                   {"t1", t}, {"t2", 1.2 * t}, {"bath", 0},
                   {"n_matsubara", h.n_matsubara}, {"depth", h.depth},
                   {"terminator", h.terminator}};
    e["value"] = rep.entries.front().value;
    e["rel_tol"] = 1e-6;
    e["convergence"] = convergence_to_json(rep);
    e["converged"] = rep.converged;
    entries.push_back(e);

    const auto model = build_model(c, t, 1.2 * t);
    const auto gk = thermo::reorganised_current(model);
    json g;
    g["name"] = "spin_reorg_gkls_current_T" + format_g17(t);
    g["kind"] = "gkls_current";
    g["params"] = {{"model", "spin_boson"}, {"epsilon0", 1.0},
                   {"lambda1", 3e-3}, {"lambda2", 1e-3}, {"cutoff", 100.0},
                   {"t1", t}, {"t2", 1.2 * t}, {"bath", 0},
                   {"reference", "reorganised"}};
    g["value"] = gk.per_bath.at(0);
    g["rel_tol"] = 1e-9;
    entries.push_back(g);
  }

  golden["entries"] = entries;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_golden: cannot open " + path);
  out << golden.dump(2) << "\n";
}

RegressionOutcome run_regression(const std::string& golden_path) {
  std::ifstream in(golden_path);
  if (!in) throw std::runtime_error("regression: cannot open golden file " + golden_path);
  json golden;
  try {
    in >> golden;
  } catch (const std::exception& ex) {
    throw std::runtime_error(std::string("regression: golden file is not valid JSON: ") +
                             ex.what());
  }
  if (!golden.contains("schema") || golden["schema"] != "qheat-golden-v1")
    throw std::runtime_error("regression: incompatible golden schema");

  RegressionOutcome out;
  json report;
  report["golden_path"] = golden_path;
  json checks = json::array();
  for (const auto& e : golden.at("entries")) {
    const double stored = e.at("value");
    const double rel_tol = e.at("rel_tol");
    const double fresh = recompute_entry(e);
    const double drift = std::abs(fresh - stored) / std::max(std::abs(stored), 1e-300);
    bool pass = drift <= rel_tol;
    json c = {{"name", e.at("name")}, {"stored", stored},       {"recomputed", fresh},
              {"rel_drift", drift},   {"rel_tol", rel_tol},     {"pass", pass}};
    if (e.contains("cross")) {
      const double other = e["cross"].at("value");
      const double cross_tol = e["cross"].at("rel_tol");
      const double cross_err = std::abs(fresh - other) / std::max(std::abs(other), 1e-300);
      const bool cross_pass = cross_err <= cross_tol;
      c["cross_rel_error"] = cross_err;
      c["cross_rel_tol"] = cross_tol;
      c["cross_pass"] = cross_pass;
      pass = pass && cross_pass;
      c["pass"] = pass;
    }
    ++out.checked;
    if (!pass) ++out.failed;
    checks.push_back(c);
  }
  report["checked"] = out.checked;
  report["failed"] = out.failed;
  report["checks"] = checks;
  out.report_json = report.dump(2);
  return out;
}

void write_currents_csv(const std::string& path, const std::vector<CurrentsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << "t1,t2,method,reference,q1,q2,clausius_sum,balance_residual,exact_q1,rel_error\n";
  for (const auto& r : rows) {
    out << format_g17(r.t1) << ',' << format_g17(r.t2) << ',' << r.method << ','
        << r.reference << ',' << format_g17(r.q1) << ',' << format_g17(r.q2) << ','
        << format_g17(r.clausius_sum) << ',' << format_g17(r.balance_residual) << ','
        << format_g17(r.exact_q1) << ',' << format_g17(r.rel_error) << '\n';
  }
}

void write_dynamics_csv(const std::string& path, const DynamicsTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "\n");
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << format_g17(row[i]) << (i + 1 < row.size() ? "," : "\n");
  }
}

}  // namespace qheat::runners
