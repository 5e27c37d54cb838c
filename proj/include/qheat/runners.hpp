#pragma once

#include "qheat/config.hpp"
#include "qheat/exact_osc.hpp"
#include "qheat/heom.hpp"
#include "qheat/models.hpp"
#include "qheat/thermo.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qheat::runners {

using config::RunConfig;

// ---- model plumbing ----

models::SystemModel build_model(const RunConfig& cfg);
models::SystemModel build_model(const RunConfig& cfg, double t1, double t2);
exact_osc::OscillatorSpec osc_spec(const RunConfig& cfg, double t1, double t2);

// Closed-form two-bath thermal-oscillator GKLS current (bath 1 into the
// system) at the reference's jump frequency; used where the Fock dimension
// needed for the dense pipeline is out of reach (very high T).
double analytic_osc_gkls_current(const RunConfig& cfg, double t1, double t2,
                                 master_eq::Reference ref);

// Fock-dimension convergence loop: grows the dimension by `step` until the
// steady-state <x^2> and currents change by less than rel_tol; returns the
// accepted dimension.
int converged_fock_dim(const RunConfig& cfg, double t1, double t2, int start = 30,
                       int step = 10, double rel_tol = 1e-3, int cap = 60);

// ---- HEOM pipeline ----

struct HeomRun {
  heom::Hierarchy hierarchy;
  Mat basis;       // transform applied to operators (identity if none)
  Mat x2;          // oscillator observable in the hierarchy basis (empty for spin)
  Mat rho0;        // initial state in the hierarchy basis
};

HeomRun make_heom_run(const RunConfig& cfg, double t1, double t2,
                      const heom::HeomConfig& hcfg);

struct HeomSteadyObs {
  double current_b1;
  double current_b2;
  double x2;  // oscillator only (0 otherwise)
  double balance;
  double residual;
  std::string method;
};

HeomSteadyObs heom_steady_observables(const RunConfig& cfg, double t1, double t2,
                                      const heom::HeomConfig& hcfg);

// exact oracle for the configured model: Eq.-(15)-style quadrature for the
// oscillator, steady HEOM for the spin
double exact_current(const RunConfig& cfg, double t1, double t2,
                     const heom::HeomConfig& hcfg, int bath_index = 0);

// ---- experiments ----

struct CurrentsRow {
  double t1, t2;
  std::string method;     // "gkls" | "redfield" | "exact"
  std::string reference;  // "conventional" | "reorganised" | "none"
  double q1, q2;
  double clausius_sum, balance_residual;
  double exact_q1;   // oracle value at this point
  double rel_error;  // |q1 - exact| / |exact| (0 for the oracle row)
};

std::vector<CurrentsRow> run_current_point(const RunConfig& cfg, double t1, double t2);
std::vector<CurrentsRow> run_current_sweep(const RunConfig& cfg);

struct DynamicsTable {
  std::vector<std::string> columns;           // "t", then per-method observables
  std::vector<std::vector<double>> rows;
};

DynamicsTable run_dynamics(const RunConfig& cfg);

heom::ConvergenceReport run_heom_convergence(const RunConfig& cfg);

// ---- golden-value regression ----

struct RegressionOutcome {
  int checked = 0;
  int failed = 0;
  std::string report_json;
};

void write_golden(const std::string& path);
RegressionOutcome run_regression(const std::string& golden_path);

// CSV helpers (17 significant digits, deterministic)
std::string format_g17(double v);
void write_currents_csv(const std::string& path, const std::vector<CurrentsRow>& rows);
void write_dynamics_csv(const std::string& path, const DynamicsTable& table);

}  // namespace qheat::runners
