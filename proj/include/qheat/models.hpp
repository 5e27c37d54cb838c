#pragma once

#include "qheat/bath.hpp"
#include "qheat/operators.hpp"

#include <array>
#include <string>
#include <vector>

namespace qheat::models {

struct Coupling {
  Mat op;  // Hermitian system operator S_i
  bath::BathSpec bath;
};

// One physical system with its baths.  When counter_term_included, the
// physical Hamiltonian is H_S = H0 + sum_i Q_i S_i^2 and the reorganised
// reference H_S^(R) = H0; otherwise H_S = H0 and H_S^(R) = H0 - sum Q_i S_i^2.
struct SystemModel {
  std::string name;
  Mat h0;  // bare Hamiltonian
  std::vector<Coupling> couplings;
  bool counter_term_included = true;

  Mat counter_term() const;  // sum_i Q_i S_i^2
  Mat h_phys() const;
  Mat h_reorganised() const;
  int dim() const { return static_cast<int>(h0.rows()); }
};

// Damped oscillator, m = 1, Fock basis of the bare frequency:
// H0 = omega0 (n + 1/2) built diagonally, x = (a + a^dag)/sqrt(2 omega0),
// S_1 = S_2 = x.
struct OscillatorOps {
  Mat x, p, x2;
};

SystemModel oscillator_model(double omega0, int fock_dim,
                             const std::array<bath::BathSpec, 2>& baths,
                             bool counter_term = true);
OscillatorOps oscillator_ops(double omega0, int fock_dim);

// Spin-boson: H0 = (eps0/2) sigma_z, S_1 = S_2 = 1 + sigma_x (the identity
// component keeps tr S != 0 so the counter term matters; a sigma_x-only
// switch exists for ablation).
SystemModel spin_boson_model(double epsilon0, const std::array<bath::BathSpec, 2>& baths,
                             bool counter_term = true, bool include_identity = true);

Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat plus_state();  // |+><+| with |+> = (|g> + |e>)/sqrt(2)

}  // namespace qheat::models
