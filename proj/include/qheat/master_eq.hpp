#pragma once

#include "qheat/bath.hpp"
#include "qheat/models.hpp"
#include "qheat/operators.hpp"

#include <string>
#include <vector>

namespace qheat::master_eq {

enum class Reference { conventional, reorganised };
enum class Flavor { secular_gkls, redfield };

// Sign of the Lamb-shift term in the unitary part: `minus` follows the
// -i[H - dH, rho] form, `plus` the usual +dH convention.
enum class LambSign { minus, plus };

std::string to_string(Reference r);
std::string to_string(Flavor f);

struct BuildOptions {
  double degeneracy_tol = 0.0;  // 0 -> 1e-9 * max|eigenvalue|
  bool include_lamb_shift = true;
  LambSign lamb_sign = LambSign::minus;
  bool absorb_lamb_shift = true;  // Redfield only
};

struct JumpOp {
  double frequency;  // Bohr frequency omega
  Mat op;            // A_omega, [H, A] = -omega A
};

struct JumpDecomposition {
  std::vector<JumpOp> jumps;
};

// A_omega = sum_{e'-e=omega} P_e S P_e'; gaps closer than degeneracy_tol are
// merged; components with negligible norm are dropped.
JumpDecomposition bohr_decompose(const Mat& h_ref, const Mat& s, double degeneracy_tol = 0.0);

struct MasterEquation {
  Reference reference = Reference::conventional;
  Flavor flavor = Flavor::secular_gkls;
  Mat h_ref;         // reference Hamiltonian (weight in the heat currents)
  Mat unitary_part;  // h_ref with the Lamb shift applied per options
  Mat lamb_shift;
  std::vector<ops::Superoperator> per_bath_dissipators;
  int dim = 0;

  Mat generator_matrix() const;  // -i[unitary_part, .] + sum dissipators
  Mat apply_generator(const Mat& rho) const;
};

MasterEquation build_gkls(const Mat& h_ref, const std::vector<models::Coupling>& couplings,
                          Reference tag, const BuildOptions& opt = {});

MasterEquation build_redfield(const Mat& h_ref,
                              const std::vector<models::Coupling>& couplings,
                              Reference tag, const BuildOptions& opt = {});

// Convenience: pick the reference Hamiltonian from the model.
MasterEquation build_for_model(const models::SystemModel& model, Reference ref,
                               Flavor flavor, const BuildOptions& opt = {});

struct SteadyState {
  Mat rho;
  double residual;        // ||G vec(rho)||_2 with tr rho = 1
  double sigma2;          // second-smallest singular value (estimate on the LU path)
  double min_eigenvalue;  // most negative eigenvalue of rho
  std::string method;     // "svd" or "lu"
};

// Null space of the vectorised generator.  Dense SVD up to `svd_limit`
// unknowns; LU-based inverse iteration with a deflated sigma_2 estimate
// beyond that (dense SVD at dim^2 ~ 3600 costs minutes on commodity
// hardware, far outside the solver budgets).
SteadyState steady_state(const MasterEquation& me, int svd_limit = 400);

struct PropagationResult {
  std::vector<Mat> states;
  double max_trace_drift = 0.0;
  double max_herm_drift = 0.0;
  long steps = 0;
};

// Adaptive propagation of d rho/dt = G rho, outputs at t_grid (ascending,
// starting at 0).  States are symmetrised; the drift removed this way is
// reported.
PropagationResult propagate(const MasterEquation& me, const Mat& rho0,
                            const std::vector<double>& t_grid, double rtol = 1e-9,
                            double atol = 1e-12);

// Gibbs state of H_S - sum_i Q_i S_i^2 at temperature T.
Mat mean_force_classical_state(const Mat& h_s,
                               const std::vector<std::pair<double, Mat>>& couplings,
                               double temperature);

}  // namespace qheat::master_eq
