#pragma once

#include "qheat/bath.hpp"

#include <array>
#include <complex>

namespace qheat::exact_osc {

using cplx = std::complex<double>;

// Two-bath damped oscillator, m = 1.  With the counter term in the
// microscopic Hamiltonian the physical frequency obeys
// w_R^2 = w0^2 + sum_i lambda_i cutoff_i.
struct OscillatorSpec {
  double omega0 = 1.0;
  std::array<bath::BathSpec, 2> baths;
  bool counter_term = true;
};

void validate(const OscillatorSpec& spec);

double omega_r_squared(const OscillatorSpec& spec);

// Laplace transform of the dissipation kernel: sum_i lambda_i L_i^2 / (s + L_i).
cplx chi_hat(const OscillatorSpec& spec, cplx s);

// Resolvent (s^2 + w_R^2 - chi_hat(s))^-1.
cplx g_hat(const OscillatorSpec& spec, cplx s);

// Steady-state heat current into the system from bath `bath_index` (0 or 1):
// (4/pi) int_0^inf dw w J_1 J_2 |g(iw)|^2 (coth(w/2T_i) - coth(w/2T_j)).
double exact_current(const OscillatorSpec& spec, int bath_index);

// Steady-state <x^2>:
// (1/pi) int_0^inf dw |g(iw)|^2 [J_1 coth(w/2T_1) + J_2 coth(w/2T_2)].
double exact_position_variance(const OscillatorSpec& spec);

// Fraction of the |current integrand| mass beyond 20*max(cutoff, T);
// the quadrature tail-bound diagnostic.
double current_tail_fraction(const OscillatorSpec& spec);

}  // namespace qheat::exact_osc
