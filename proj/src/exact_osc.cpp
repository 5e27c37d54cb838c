#include "qheat/exact_osc.hpp"

#include "qheat/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace qheat::exact_osc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

double coth_half(double omega, double temperature) {
  // coth(w / 2T) = 1 + 2 n(w)
  return 1.0 + 2.0 / std::expm1(omega / temperature);
}

double abs_g_sq(const OscillatorSpec& spec, double w) {
  const double wr2 = omega_r_squared(spec);
  double re = wr2 - w * w;
  double im = 0.0;
  for (const auto& b : spec.baths) {
    const double L = b.sd.cutoff;
    const double den = L * L + w * w;
    re -= b.sd.lambda * L * L * L / den;
    im += b.sd.lambda * L * L * w / den;
  }
  return 1.0 / (re * re + im * im);
}

double current_integrand(const OscillatorSpec& spec, double w, int i, int j) {
  if (w <= 0.0) return 0.0;
  const double j1 = bath::j_omega(spec.baths[0].sd, w);
  const double j2 = bath::j_omega(spec.baths[1].sd, w);
  const double ci = coth_half(w, spec.baths[i].temperature);
  const double cj = coth_half(w, spec.baths[j].temperature);
  return w * j1 * j2 * abs_g_sq(spec, w) * (ci - cj);
}

}  // namespace

void validate(const OscillatorSpec& spec) {
  if (spec.omega0 <= 0.0) throw std::invalid_argument("OscillatorSpec: omega0 must be > 0");
  for (const auto& b : spec.baths) bath::validate(b);
  if (omega_r_squared(spec) <= 0.0)
    throw std::invalid_argument("OscillatorSpec: w_R^2 must be positive");
}

double omega_r_squared(const OscillatorSpec& spec) {
  double wr2 = spec.omega0 * spec.omega0;
  for (const auto& b : spec.baths) wr2 += b.sd.lambda * b.sd.cutoff;
  return wr2;
}

cplx chi_hat(const OscillatorSpec& spec, cplx s) {
  cplx out(0.0, 0.0);
  for (const auto& b : spec.baths) {
    const double L = b.sd.cutoff;
    const cplx den = s + L;
    if (std::abs(den) < 1e-14 * L)
      throw std::invalid_argument("chi_hat: evaluation at a kernel pole");
    out += b.sd.lambda * L * L / den;
  }
  return out;
}

cplx g_hat(const OscillatorSpec& spec, cplx s) {
  const cplx den = s * s + omega_r_squared(spec) - chi_hat(spec, s);
  if (std::abs(den) < 1e-14)
    throw std::invalid_argument("g_hat: resolvent evaluated at a resonance");
  return 1.0 / den;
}

double exact_current(const OscillatorSpec& spec, int bath_index) {
  validate(spec);
  if (bath_index < 0 || bath_index > 1)
    throw std::invalid_argument("exact_current: bath_index must be 0 or 1");
  const int i = bath_index;
  const int j = 1 - bath_index;

  const double scale = std::max(spec.baths[0].sd.cutoff, spec.baths[1].sd.cutoff);
  quad::Options opt;
  opt.rel_tol = 1e-9;
  opt.abs_tol = 1e-16;
  opt.max_segments = 20000;
  auto r = quad::integrate_semi_inf(
      [&](double w) { return current_integrand(spec, w, i, j); }, scale, opt);
  if (!r.converged) throw std::runtime_error("exact_current: quadrature failure");
  return 4.0 / kPi * r.value;
}

double exact_position_variance(const OscillatorSpec& spec) {
  validate(spec);
  auto f = [&](double w) {
    if (w <= 0.0) return 0.0;
    double s = 0.0;
    for (const auto& b : spec.baths) {
      // J(w) coth(w/2T) -> 2 lambda T at w -> 0; the formula below is stable
      s += bath::j_omega(b.sd, w) * coth_half(w, b.temperature);
    }
    return abs_g_sq(spec, w) * s;
  };
  const double scale = std::max(
      {spec.omega0, spec.baths[0].sd.cutoff, spec.baths[1].sd.cutoff});
  quad::Options opt;
  opt.rel_tol = 1e-9;
  opt.abs_tol = 1e-16;
  opt.max_segments = 20000;
  auto r = quad::integrate_semi_inf(f, scale, opt);
  if (!r.converged)
    throw std::runtime_error("exact_position_variance: quadrature failure");
  return r.value / kPi;
}

double current_tail_fraction(const OscillatorSpec& spec) {
  validate(spec);
  const double edge = 20.0 * std::max({spec.baths[0].sd.cutoff, spec.baths[1].sd.cutoff,
                                       spec.baths[0].temperature,
                                       spec.baths[1].temperature});
  auto af = [&](double w) { return std::abs(current_integrand(spec, w, 0, 1)); };
  quad::Options opt;
  opt.rel_tol = 1e-8;
  opt.abs_tol = 1e-300;
  opt.max_segments = 20000;
  const double body = quad::integrate(af, 0.0, edge, opt).value;
  // map the remaining half-line through the same tangent substitution
  auto tail = quad::integrate_semi_inf([&](double w) { return af(w + edge); }, edge, opt);
  const double total = body + tail.value;
  return total > 0.0 ? tail.value / total : 0.0;
}

}  // namespace qheat::exact_osc
