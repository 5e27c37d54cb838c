#pragma once

#include <complex>
#include <vector>

namespace qheat::bath {

using cplx = std::complex<double>;

// Ohmic spectral density with algebraic cutoff, J(w) = lambda*w / (1 + (w/cutoff)^2).
struct SpectralDensity {
  double lambda = 0.0;  // dissipation strength (zero = decoupled limit)
  double cutoff = 1.0;  // high-frequency cutoff
};

// One heat bath.  The microscopic coupling scale zeta is folded into lambda
// (zeta == 1 convention); the pairing with a system coupling operator is
// held by the model that owns this bath.
struct BathSpec {
  SpectralDensity sd;
  double temperature = 1.0;
};

void validate(const SpectralDensity& sd);
void validate(const BathSpec& b);

// J(w), odd-extended: J(-w) = -J(w).
double j_omega(const SpectralDensity& sd, double omega);

// Q = lambda*cutoff/2 (= (1/pi) int_0^inf J(w)/w dw for this profile).
double reorganisation_energy(const SpectralDensity& sd);

// Same quantity by direct quadrature; test oracle for the closed form.
double reorganisation_energy_quadrature(const SpectralDensity& sd);

// Bose-Einstein occupation at signed frequency; throws std::domain_error at
// omega == 0 (callers use the w->0 limit path in rate()).
double occupation(double temperature, double omega);

// Golden-rule rate: 2 J(w)(n+1) for w>0, 2 J(|w|) n for w<0, 2*lambda*T at
// w == 0; detailed balance gamma(-w)/gamma(w) = exp(-w/T) holds by
// construction.
double rate(const BathSpec& b, double omega);

// Lamb-shift coefficient S(w) = -(1/pi) PV int dw' f(w')/(w'-w) with
// f(w') = J(w')(n(w')+1) = gamma(w')/2.  Throws on quadrature failure.
double lamb_coefficient(const BathSpec& b, double omega);

// Exponential decomposition of the bath correlation function
//   C(t>0) = sum_k c_k exp(-nu_k t),
// term 0 being the cutoff pole (nu_0 = cutoff) and terms k = 1..n_matsubara
// the Matsubara modes (nu_k = 2 pi k T).  markovian_tail holds the residual
// sum_{k > n_matsubara} c_k / nu_k used by the HEOM terminator.
struct ExponentialSeries {
  struct Term {
    cplx amplitude;
    cplx decay;
  };
  std::vector<Term> terms;
  int n_matsubara = 0;
  double markovian_tail = 0.0;
};

ExponentialSeries correlation_series(const BathSpec& b, int n_matsubara);

cplx series_value(const ExponentialSeries& s, double t);

// Direct quadrature of C(t) (independent oracle; t > 0 strictly --
// Re C(0) is log-divergent for this spectral density).
cplx correlation_quadrature(const BathSpec& b, double t);

// |series - quadrature| at time t.
double reconstruction_error(const ExponentialSeries& s, const BathSpec& b, double t);

}  // namespace qheat::bath
