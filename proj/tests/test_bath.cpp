#include "qheat/bath.hpp"

#include "qheat/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qheat;
using bath::BathSpec;
using bath::SpectralDensity;

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

// thermal part of gamma/2 with the T = 0 piece removed:
// h(w) = gamma(w)/2 - theta(w) J(w); even in w and exponentially damped
double h_fn(const BathSpec& b, double w) {
  double v = 0.5 * bath::rate(b, w);
  if (w > 0.0) v -= bath::j_omega(b.sd, w);
  return v;
}

// closed-form Hilbert transform of theta(w) J(w) (verified numerically below)
double hilbert_theta_j(const BathSpec& b, double w) {
  const double lam = b.sd.lambda;
  const double cut = b.sd.cutoff;
  const double den = w * w + cut * cut;
  const double log_term = w == 0.0 ? 0.0 : (w / den) * std::log(cut / std::abs(w));
  return lam * cut * cut / kPi * (log_term + kPi * cut / (2.0 * den));
}

// -H[h](w) with controlled tails (h decays exponentially)
double s_thermal(const BathSpec& b, double w, double rel = 1e-9) {
  quad::Options opt;
  opt.rel_tol = rel;
  opt.abs_tol = 1e-14;
  const double reach = 50.0 * b.temperature + 5.0 * b.sd.cutoff + std::abs(w) + 10.0;
  const double window = std::max(1.0, 0.1 * std::abs(w));
  auto f = [&b](double x) { return h_fn(b, x); };
  const auto win = quad::pv_symmetric_window(f, w, window, 1e-7, opt);
  const auto left = quad::integrate([&](double x) { return f(x) / (x - w); }, -reach,
                                    w - window, opt);
  const auto right = quad::integrate([&](double x) { return f(x) / (x - w); },
                                     w + window, reach, opt);
  return -(win.value + left.value + right.value) / kPi;
}

}  // namespace

TEST_CASE("spectral density values") {
  SpectralDensity sd{0.01, 100.0};
  CHECK(bath::j_omega(sd, 1.0) == doctest::Approx(0.0099990001).epsilon(1e-8));
  CHECK(bath::j_omega(sd, 0.0) == 0.0);
  CHECK(bath::j_omega(sd, 100.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bath::j_omega(sd, -1.0) == doctest::Approx(-bath::j_omega(sd, 1.0)));
}

TEST_CASE("reorganisation energy closed form and quadrature agree") {
  SpectralDensity sd{0.01, 100.0};
  CHECK(bath::reorganisation_energy(sd) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(bath::reorganisation_energy_quadrature(sd) - 0.5) < 1e-8);

  SpectralDensity zero{0.0, 50.0};
  CHECK(bath::reorganisation_energy(zero) == 0.0);

  SpectralDensity fig3{3e-3, 100.0};
  CHECK(bath::reorganisation_energy(fig3) == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(std::abs(bath::reorganisation_energy_quadrature(fig3) - 0.15) < 1e-8);
}

TEST_CASE("occupation") {
  CHECK(bath::occupation(1.0, 1.0) ==
        doctest::Approx(1.0 / std::expm1(1.0)).epsilon(1e-14));
  CHECK(bath::occupation(1.0, 1.0) == doctest::Approx(0.5819767).epsilon(1e-6));
  CHECK(bath::occupation(1e-3, 1.0) < 1e-300);  // zero-temperature limit
  CHECK(bath::occupation(1.0, 1e-6) == doctest::Approx(1e6).epsilon(0.01));
  CHECK_THROWS_AS(bath::occupation(1.0, 0.0), std::domain_error);
}

TEST_CASE("golden-rule rate and detailed balance") {
  BathSpec b{{0.01, 100.0}, 1.0};
  const double n1 = 1.0 / std::expm1(1.0);
  CHECK(bath::rate(b, 1.0) ==
        doctest::Approx(2.0 * bath::j_omega(b.sd, 1.0) * (n1 + 1.0)).epsilon(1e-14));
  CHECK(bath::rate(b, 1.0) == doctest::Approx(0.0316364).epsilon(1e-5));
  CHECK(bath::rate(b, -1.0) / bath::rate(b, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-13));

  // w -> 0 limit path
  CHECK(bath::rate(b, 0.0) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(bath::rate(b, 1e-8) == doctest::Approx(0.02).epsilon(1e-6));

  // detailed balance as an algebraic identity over random draws
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> uw(-5.0, 5.0), ut(0.1, 10.0);
  for (int k = 0; k < 200; ++k) {
    double w = uw(rng);
    if (std::abs(w) < 1e-3) w = 1e-3;
    const double t = ut(rng);
    BathSpec bb{{0.01, 100.0}, t};
    const double ratio = bath::rate(bb, -w) / bath::rate(bb, w);
    const double expect = std::exp(-w / t);
    CHECK(std::abs(ratio - expect) <= 1e-12 * expect);
  }
}

TEST_CASE("lamb coefficient: zero coupling and smooth scan") {
  BathSpec off{{0.0, 10.0}, 1.0};
  CHECK(bath::lamb_coefficient(off, 0.7) == 0.0);

  BathSpec b{{0.01, 10.0}, 1.0};
  double prev = 0.0;
  bool first = true;
  for (double w = -5.0; w <= 5.0 + 1e-9; w += 0.5) {
    const double s = bath::lamb_coefficient(b, w);
    CHECK(std::isfinite(s));
    if (!first) CHECK(std::abs(s - prev) < 0.1);  // bounded first differences
    prev = s;
    first = false;
  }
}

TEST_CASE("lamb coefficient equals closed-form plus thermal split") {
  // S(w) = -H[theta J](w) - H[h](w); the first term has a closed form, the
  // second is an exponentially damped PV integral.  This cross-checks the
  // production integrator on an independent decomposition.
  BathSpec b{{0.01, 10.0}, 1.0};
  for (double w : {-2.0, -0.5, 0.3, 1.0, 4.0}) {
    const double split = -hilbert_theta_j(b, w) + s_thermal(b, w);
    const double direct = bath::lamb_coefficient(b, w);
    CHECK(direct == doctest::Approx(split).epsilon(2e-6));
  }
  // stays finite when T dwarfs every other scale
  BathSpec hot{{0.01, 10.0}, 1000.0};
  const double s_hot = bath::lamb_coefficient(hot, 1.0);
  CHECK(std::isfinite(s_hot));
  const double split_hot = -hilbert_theta_j(hot, 1.0) + s_thermal(hot, 1.0);
  CHECK(s_hot == doctest::Approx(split_hot).epsilon(2e-5));
}

TEST_CASE("closed-form Hilbert transform of theta J checks out numerically") {
  BathSpec b{{0.01, 10.0}, 1.0};
  for (double w : {-1.7, 0.4, 2.0}) {
    quad::Options opt;
    opt.rel_tol = 1e-10;
    const double window = std::max(0.5, 0.2 * std::abs(w));
    auto f = [&b](double x) { return x > 0.0 ? bath::j_omega(b.sd, x) : 0.0; };
    double total = 0.0;
    if (w > window) {  // pole inside the support: subtract inside a window
      total += quad::pv_symmetric_window(f, w, window, 1e-7, opt).value;
      total += quad::integrate([&](double x) { return f(x) / (x - w); }, 0.0,
                               w - window, opt)
                   .value;
      total += quad::integrate([&](double x) { return f(x) / (x - w); }, w + window,
                               500.0 * b.sd.cutoff, opt)
                   .value;
    } else {
      total += quad::integrate([&](double x) { return f(x) / (x - w); }, 0.0,
                               500.0 * b.sd.cutoff, opt)
                   .value;
    }
    // algebraic far tail
    const double x_max = 500.0 * b.sd.cutoff;
    total += b.sd.lambda * b.sd.cutoff * b.sd.cutoff *
             (w == 0.0 ? 1.0 / x_max : -std::log1p(-w / x_max) / w);
    CHECK(total / kPi == doctest::Approx(hilbert_theta_j(b, w)).epsilon(1e-5));
  }
}

TEST_CASE("double Hilbert transform returns gamma/2") {
  // S_h := -H[h] is computed from the production-style PV pieces; applying H
  // once more must reproduce h, hence gamma/2 = H[S](w) with the theta-J part
  // handled by its exact Hilbert pair.
  BathSpec b{{0.01, 10.0}, 1.0};
  quad::Options opt;
  opt.rel_tol = 1e-8;
  opt.abs_tol = 1e-13;

  const double reach = 50.0 * b.temperature + 5.0 * b.sd.cutoff;
  const double m_h =
      quad::integrate([&](double x) { return h_fn(b, x); }, -reach, reach, opt).value;

  for (double w0 : {0.6, 1.5}) {
    auto s_h = [&](double x) { return s_thermal(b, x, 1e-8); };
    const double window = 1.0;
    const double x_cut = 60.0 * std::max(b.temperature, b.sd.cutoff);
    double total = quad::pv_symmetric_window(s_h, w0, window, 1e-6, opt).value;
    total += quad::integrate([&](double x) { return s_h(x) / (x - w0); }, -x_cut,
                             w0 - window, opt)
                 .value;
    total += quad::integrate([&](double x) { return s_h(x) / (x - w0); }, w0 + window,
                             x_cut, opt)
                 .value;
    // tails: S_h ~ -(m_h/pi)/x, odd powers only (h is even)
    total += (-m_h / kPi) * (-std::log1p(-w0 / x_cut) / w0);  // right
    total += (-m_h / kPi) * (std::log1p(w0 / x_cut) / w0);    // left
    const double roundtrip = total / kPi;  // = H[S_h](w0) = h(w0)
    const double gamma_half_rt = roundtrip + bath::j_omega(b.sd, w0);
    const double expect = 0.5 * bath::rate(b, w0);
    CHECK(gamma_half_rt == doctest::Approx(expect).epsilon(1e-4));
  }
}

TEST_CASE("correlation series structure") {
  BathSpec b{{3e-3, 100.0}, 1.0};
  const auto s = bath::correlation_series(b, 10);
  REQUIRE(s.terms.size() == 11);
  CHECK(s.terms[0].decay.real() == doctest::Approx(100.0));
  CHECK(s.terms[1].decay.real() == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(s.terms[1].decay.real() == doctest::Approx(6.2831853).epsilon(1e-7));
  for (const auto& t : s.terms) CHECK(t.decay.real() > 0.0);

  // Matsubara amplitudes from the residue formula
  const double q = bath::reorganisation_energy(b.sd);
  for (int k = 1; k <= 10; ++k) {
    const double nu = 2.0 * kPi * k;
    const double expect = 4.0 * q * 100.0 * 1.0 * nu / (nu * nu - 1e4);
    CHECK(s.terms[k].amplitude.real() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(s.terms[k].amplitude.imag() == 0.0);
  }

  // the Markovian tail matches a brute-force partial sum of dropped modes
  double brute = 0.0;
  for (int k = 11; k <= 2000000; ++k) {
    const double nu = 2.0 * kPi * k;
    brute += 4.0 * q * 100.0 / (nu * nu - 1e4);
  }
  CHECK(s.markovian_tail == doctest::Approx(brute).epsilon(1e-5));
}

TEST_CASE("imaginary part of C(t) is temperature independent") {
  BathSpec cold{{3e-3, 100.0}, 0.7};
  BathSpec hot{{3e-3, 100.0}, 2.3};
  const auto sc = bath::correlation_series(cold, 8);
  const auto sh = bath::correlation_series(hot, 8);
  const double q = bath::reorganisation_energy(cold.sd);
  for (double t : {0.005, 0.02, 0.1}) {
    const double expect = -q * 100.0 * std::exp(-100.0 * t);
    CHECK(bath::series_value(sc, t).imag() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(bath::series_value(sh, t).imag() == doctest::Approx(expect).epsilon(1e-12));
    // quadrature oracle agrees with the closed form
    CHECK(bath::correlation_quadrature(cold, t).imag() ==
          doctest::Approx(expect).epsilon(1e-7));
  }
}

TEST_CASE("series reconstructs the correlation function") {
  BathSpec b{{3e-3, 100.0}, 1.0};
  // Re C(0) is log-divergent for this profile, so t = 0 is excluded by
  // contract; reconstruction is checked at 1/cutoff, 1/T and in between.
  CHECK_THROWS(bath::correlation_quadrature(b, 0.0));

  const auto s10 = bath::correlation_series(b, 10);
  const auto s40 = bath::correlation_series(b, 40);
  const auto s80 = bath::correlation_series(b, 80);
  for (double t : {0.01, 0.1, 1.0}) {
    const double e10 = bath::reconstruction_error(s10, b, t);
    const double e40 = bath::reconstruction_error(s40, b, t);
    const double e80 = bath::reconstruction_error(s80, b, t);
    CHECK(e10 < 2e-2);
    CHECK(e40 <= e10 * 1.01);
    CHECK(e80 < 2e-6);
  }
  // convergence achieved by N_k = 80 at the mid time used by the HEOM notes
  CHECK(bath::reconstruction_error(s80, b, 0.1) < 5e-7);
}
