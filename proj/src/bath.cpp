#include "qheat/bath.hpp"

#include "qheat/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qheat::bath {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

// int_X^inf exp(i w t) / w^m dw by repeated integration by parts; valid for
// t*X >> 1 (we keep five terms, truncation ~ (m+4)!/(tX)^5).
cplx osc_tail(int m, double x, double t) {
  const cplx i(0.0, 1.0);
  const cplx phase = std::exp(i * (t * x));
  cplx sum(0.0, 0.0);
  cplx pref = -phase / (i * t);
  double xm = std::pow(x, m);
  double mm = m;
  cplx term = pref / xm;
  for (int k = 0; k < 5; ++k) {
    sum += term;
    term *= mm / (i * t * x);
    mm += 1.0;
  }
  return sum;
}

double cot(double x) { return std::cos(x) / std::sin(x); }

}  // namespace

void validate(const SpectralDensity& sd) {
  if (sd.lambda < 0.0 || !std::isfinite(sd.lambda))
    throw std::invalid_argument("SpectralDensity: lambda must be >= 0");
  if (sd.cutoff <= 0.0 || !std::isfinite(sd.cutoff))
    throw std::invalid_argument("SpectralDensity: cutoff must be > 0");
}

void validate(const BathSpec& b) {
  validate(b.sd);
  if (b.temperature <= 0.0 || !std::isfinite(b.temperature))
    throw std::invalid_argument("BathSpec: temperature must be > 0");
}

double j_omega(const SpectralDensity& sd, double omega) {
  const double r = omega / sd.cutoff;
  return sd.lambda * omega / (1.0 + r * r);
}

double reorganisation_energy(const SpectralDensity& sd) {
  return 0.5 * sd.lambda * sd.cutoff;
}

double reorganisation_energy_quadrature(const SpectralDensity& sd) {
  auto f = [&sd](double w) { return w == 0.0 ? sd.lambda : j_omega(sd, w) / w; };
  quad::Options opt;
  opt.rel_tol = 1e-11;
  auto r = quad::integrate_semi_inf(f, sd.cutoff, opt);
  if (!r.converged)
    throw std::runtime_error("reorganisation_energy_quadrature: no convergence");
  return r.value / kPi;
}

double occupation(double temperature, double omega) {
  if (temperature <= 0.0) throw std::invalid_argument("occupation: T must be > 0");
  if (omega == 0.0)
    throw std::domain_error("occupation: omega == 0, use the w->0 limit path");
  return 1.0 / std::expm1(omega / temperature);
}

double rate(const BathSpec& b, double omega) {
  if (omega == 0.0) return 2.0 * b.sd.lambda * b.temperature;
  const double aw = std::abs(omega);
  const double j = j_omega(b.sd, aw);
  const double n = 1.0 / std::expm1(aw / b.temperature);
  return omega > 0.0 ? 2.0 * j * (n + 1.0) : 2.0 * j * n;
}

double lamb_coefficient(const BathSpec& b, double omega) {
  validate(b);
  if (b.sd.lambda == 0.0) return 0.0;
  const double lam = b.sd.lambda;
  const double cut = b.sd.cutoff;
  const double T = b.temperature;
  auto f = [&b](double w) { return 0.5 * rate(b, w); };

  quad::Options opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-13 * lam * cut;  // absolute floor tied to the S(w) scale
  opt.max_segments = 6000;

  const double window = std::max({1.0, 0.05 * cut, 0.1 * std::abs(omega)});
  const double fd_step = 1e-6 * std::min({T, cut, window});
  auto win = quad::pv_symmetric_window(f, omega, window, fd_step, opt);

  // exponentially damped left part
  const double lo = -(50.0 * T + 5.0 * cut + std::abs(omega) + 10.0);
  auto left = quad::integrate(
      [&](double w) { return f(w) / (w - omega); }, lo, omega - window, opt);

  // algebraic right part up to X, then the analytic 1/w and 1/w^3 remainders
  const double X = 50.0 * std::max({cut, T, std::abs(omega), 1.0});
  auto right = quad::integrate(
      [&](double w) { return f(w) / (w - omega); }, omega + window, X, opt);

  double a1, a3;  // int_X^inf dw / (w^m (w-omega)), m = 1, 3
  if (std::abs(omega) < 1e-8 * X) {
    a1 = 1.0 / X + omega / (2.0 * X * X);
    a3 = 1.0 / (3.0 * X * X * X);
  } else {
    const double l = std::log1p(-omega / X);
    a1 = -l / omega;
    a3 = -1.0 / (2.0 * omega * X * X) - 1.0 / (omega * omega * X) -
         l / (omega * omega * omega);
  }
  const double tail = lam * cut * cut * a1 - lam * std::pow(cut, 4) * a3;

  if (!win.converged || !left.converged || !right.converged) {
    const double resid = win.error + left.error + right.error;
    throw std::runtime_error("lamb_coefficient: PV quadrature did not converge, residual ~ " +
                             std::to_string(resid));
  }
  return -(win.value + left.value + right.value + tail) / kPi;
}

ExponentialSeries correlation_series(const BathSpec& b, int n_matsubara) {
  validate(b);
  if (n_matsubara < 0)
    throw std::invalid_argument("correlation_series: n_matsubara must be >= 0");
  const double T = b.temperature;
  const double cut = b.sd.cutoff;
  const double q = reorganisation_energy(b.sd);
  const double x = cut / (2.0 * T);  // = beta*cutoff/2

  ExponentialSeries s;
  s.n_matsubara = n_matsubara;
  s.terms.reserve(n_matsubara + 1);
  s.terms.push_back({cplx(q * cut * cot(x), -q * cut), cplx(cut, 0.0)});

  double partial = 0.0;  // sum_{k<=N} c_k / nu_k
  for (int k = 1; k <= n_matsubara; ++k) {
    const double nu = 2.0 * kPi * k * T;
    if (std::abs(nu - cut) < 1e-9 * cut)
      throw std::invalid_argument(
          "correlation_series: Matsubara frequency degenerate with the cutoff pole; "
          "perturb T or the cutoff");
    const double c = 4.0 * q * cut * T * nu / (nu * nu - cut * cut);
    s.terms.push_back({cplx(c, 0.0), cplx(nu, 0.0)});
    partial += c / nu;
  }
  // full Matsubara sum has the closed form Q*(1/x - cot x)
  s.markovian_tail = q * (1.0 / x - cot(x)) - partial;
  return s;
}

cplx series_value(const ExponentialSeries& s, double t) {
  cplx out(0.0, 0.0);
  for (const auto& term : s.terms) out += term.amplitude * std::exp(-term.decay * t);
  return out;
}

cplx correlation_quadrature(const BathSpec& b, double t) {
  validate(b);
  if (t <= 0.0)
    throw std::invalid_argument("correlation_quadrature: t must be > 0 "
                                "(Re C(0) is log-divergent for this profile)");
  const double T = b.temperature;
  const double cut = b.sd.cutoff;
  const double lam = b.sd.lambda;
  // beyond X the integrand is (lam*cut^2/w - lam*cut^4/w^3) * e^{+-iwt} up to
  // exponentially small thermal corrections; need t*X large for the tail series
  const double X = std::max(40.0 * std::max({cut, T, 1.0}), 1500.0 / t);

  auto re_f = [&](double w) {
    const double j = j_omega(b.sd, w);
    const double c = w == 0.0 ? 2.0 * T : w * (1.0 + 2.0 / std::expm1(w / T));
    const double jc = w == 0.0 ? lam * c : j / w * c;  // J(w) coth(w/2T), finite at 0
    return jc * std::cos(w * t);
  };
  auto im_f = [&](double w) { return -j_omega(b.sd, w) * std::sin(w * t); };

  quad::Options opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12 * std::max(1.0, lam * cut);
  opt.max_segments = static_cast<int>(std::min(40000.0, 800.0 + 3.0 * X * t));

  auto re_q = quad::integrate(re_f, 0.0, X, opt);
  auto im_q = quad::integrate(im_f, 0.0, X, opt);
  if (!re_q.converged || !im_q.converged)
    throw std::runtime_error("correlation_quadrature: no convergence");

  const cplx e1 = osc_tail(1, X, t);
  const cplx e3 = osc_tail(3, X, t);
  const double re_tail = lam * cut * cut * e1.real() - lam * std::pow(cut, 4) * e3.real();
  const double im_tail = -(lam * cut * cut * e1.imag() - lam * std::pow(cut, 4) * e3.imag());

  return cplx((re_q.value + re_tail) / kPi, (im_q.value + im_tail) / kPi);
}

double reconstruction_error(const ExponentialSeries& s, const BathSpec& b, double t) {
  return std::abs(series_value(s, t) - correlation_quadrature(b, t));
}

}  // namespace qheat::bath
