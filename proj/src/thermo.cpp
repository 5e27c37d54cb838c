#include "qheat/thermo.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qheat::thermo {

double heat_current(const master_eq::MasterEquation& me, const Mat& tau, int bath_index,
                    double stationarity_tol) {
  if (bath_index < 0 ||
      bath_index >= static_cast<int>(me.per_bath_dissipators.size()))
    throw std::invalid_argument("heat_current: bath index out of range");
  const double residual = me.apply_generator(tau).norm();
  if (residual > stationarity_tol)
    throw std::invalid_argument("heat_current: state is not stationary, residual " +
                                std::to_string(residual));
  const Mat flow = me.per_bath_dissipators[bath_index].apply(tau);
  return std::real((me.h_ref * flow).trace());
}

CurrentReport current_report(const master_eq::MasterEquation& me,
                             const master_eq::SteadyState& ss,
                             const std::vector<double>& temperatures) {
  if (temperatures.size() != me.per_bath_dissipators.size())
    throw std::invalid_argument("current_report: one temperature per bath required");
  CurrentReport r;
  r.reference = me.reference;
  r.flavor = me.flavor;
  r.steady_residual = ss.residual;
  r.sigma2 = ss.sigma2;
  r.min_eigenvalue = ss.min_eigenvalue;
  for (std::size_t i = 0; i < temperatures.size(); ++i)
    r.per_bath.push_back(heat_current(me, ss.rho, static_cast<int>(i)));
  const double total = std::accumulate(r.per_bath.begin(), r.per_bath.end(), 0.0);
  r.balance_residual = std::abs(total);
  r.clausius_sum = 0.0;
  for (std::size_t i = 0; i < temperatures.size(); ++i)
    r.clausius_sum += r.per_bath[i] / temperatures[i];
  return r;
}

CurrentReport steady_currents(const models::SystemModel& model, master_eq::Reference ref,
                              master_eq::Flavor flavor,
                              const master_eq::BuildOptions& opt) {
  const auto me = master_eq::build_for_model(model, ref, flavor, opt);
  const auto ss = master_eq::steady_state(me);
  std::vector<double> temps;
  for (const auto& c : model.couplings) temps.push_back(c.bath.temperature);
  return current_report(me, ss, temps);
}

CurrentReport reorganised_current(const models::SystemModel& model,
                                  master_eq::Flavor flavor,
                                  const master_eq::BuildOptions& opt) {
  return steady_currents(model, master_eq::Reference::reorganised, flavor, opt);
}

CurrentReport conventional_current(const models::SystemModel& model,
                                   master_eq::Flavor flavor,
                                   const master_eq::BuildOptions& opt) {
  return steady_currents(model, master_eq::Reference::conventional, flavor, opt);
}

ClausiusAudit clausius_audit(const CurrentReport& report,
                             const std::vector<double>& temperatures, double tol) {
  if (temperatures.size() != report.per_bath.size())
    throw std::invalid_argument("clausius_audit: one temperature per bath required");
  ClausiusAudit a;
  a.sum = 0.0;
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    if (temperatures[i] <= 0.0)
      throw std::invalid_argument("clausius_audit: temperatures must be positive");
    a.sum += report.per_bath[i] / temperatures[i];
  }
  a.guaranteed = report.flavor == master_eq::Flavor::secular_gkls;
  a.pass = a.sum <= tol;
  return a;
}

}  // namespace qheat::thermo
