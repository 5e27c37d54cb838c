#pragma once

#include "qheat/master_eq.hpp"
#include "qheat/models.hpp"

#include <vector>

namespace qheat::thermo {

// Sign convention: positive current = energy flowing from the bath into the
// system, Q_i = tr[H_ref L_i(tau)].
struct CurrentReport {
  std::vector<double> per_bath;
  double clausius_sum = 0.0;      // sum_i Qdot_i / T_i
  double balance_residual = 0.0;  // |sum_i Qdot_i|
  master_eq::Reference reference = master_eq::Reference::conventional;
  master_eq::Flavor flavor = master_eq::Flavor::secular_gkls;
  double steady_residual = 0.0;
  double sigma2 = 0.0;
  double min_eigenvalue = 0.0;
};

// tr[H_ref L_i(tau)]; throws if tau is not stationary for the full generator.
double heat_current(const master_eq::MasterEquation& me, const Mat& tau, int bath_index,
                    double stationarity_tol = 1e-8);

CurrentReport current_report(const master_eq::MasterEquation& me,
                             const master_eq::SteadyState& ss,
                             const std::vector<double>& temperatures);

// Build the requested master equation for the model, solve the steady state
// and evaluate all per-bath currents.
CurrentReport steady_currents(const models::SystemModel& model, master_eq::Reference ref,
                              master_eq::Flavor flavor,
                              const master_eq::BuildOptions& opt = {});

CurrentReport reorganised_current(const models::SystemModel& model,
                                  master_eq::Flavor flavor = master_eq::Flavor::secular_gkls,
                                  const master_eq::BuildOptions& opt = {});

CurrentReport conventional_current(const models::SystemModel& model,
                                   master_eq::Flavor flavor = master_eq::Flavor::secular_gkls,
                                   const master_eq::BuildOptions& opt = {});

struct ClausiusAudit {
  double sum = 0.0;
  bool pass = false;
  bool guaranteed = false;  // GKLS flavor only; Redfield is audited but may fail
};

ClausiusAudit clausius_audit(const CurrentReport& report,
                             const std::vector<double>& temperatures,
                             double tol = 1e-12);

}  // namespace qheat::thermo
