#include "qheat/ode.hpp"

#include <algorithm>
#include <cmath>

namespace qheat::ode {

namespace {

// Dormand-Prince coefficients
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// error coefficients (b - bhat)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Stats Dopri5::integrate(std::vector<cplx>& y, double t0, double t1, const Options& opt) {
  using kernels::zaxpy;
  using kernels::zaxpy2;
  using kernels::zxpay;
  Stats st;
  if (t1 <= t0) return st;
  const std::size_t n = n_;
  double t = t0;
  const double span = t1 - t0;
  const double h_max = opt.h_max > 0.0 ? opt.h_max : span;

  if (!have_fsal_ || fsal_t_ != t0) {
    rhs_(t, y.data(), k_[0].data());
    ++st.rhs_evals;
  }
  double h = opt.h_init;
  if (h <= 0.0) {
    // crude initial step from the first derivative scale
    const double ynorm = std::sqrt(kernels::nrm2sq(n, y.data()));
    const double fnorm = std::sqrt(kernels::nrm2sq(n, k_[0].data()));
    h = fnorm > 0.0 ? 0.01 * std::max(ynorm, 1.0) / fnorm : 1e-4 * span;
    h = std::min(h, 0.1 * span);
  }
  h = std::min(h, h_max);

  while (t < t1) {
    if (st.steps + st.rejected >= opt.max_steps)
      throw std::runtime_error("Dopri5: max step count exceeded");
    h = std::min(h, t1 - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw std::runtime_error("Dopri5: step size underflow");

    zxpay(n, y.data(), h * a21, k_[0].data(), ytmp_.data());
    rhs_(t + c2 * h, ytmp_.data(), k_[1].data());

    zxpay(n, y.data(), h * a31, k_[0].data(), ytmp_.data());
    zaxpy(n, h * a32, k_[1].data(), ytmp_.data());
    rhs_(t + c3 * h, ytmp_.data(), k_[2].data());

    zxpay(n, y.data(), h * a41, k_[0].data(), ytmp_.data());
    zaxpy2(n, h * a42, k_[1].data(), h * a43, k_[2].data(), ytmp_.data());
    rhs_(t + c4 * h, ytmp_.data(), k_[3].data());

    zxpay(n, y.data(), h * a51, k_[0].data(), ytmp_.data());
    zaxpy2(n, h * a52, k_[1].data(), h * a53, k_[2].data(), ytmp_.data());
    zaxpy(n, h * a54, k_[3].data(), ytmp_.data());
    rhs_(t + c5 * h, ytmp_.data(), k_[4].data());

    zxpay(n, y.data(), h * a61, k_[0].data(), ytmp_.data());
    zaxpy2(n, h * a62, k_[1].data(), h * a63, k_[2].data(), ytmp_.data());
    zaxpy2(n, h * a64, k_[3].data(), h * a65, k_[4].data(), ytmp_.data());
    rhs_(t + h, ytmp_.data(), k_[5].data());

    zxpay(n, y.data(), h * b1, k_[0].data(), ynew_.data());
    zaxpy2(n, h * b3, k_[2].data(), h * b4, k_[3].data(), ynew_.data());
    zaxpy2(n, h * b5, k_[4].data(), h * b6, k_[5].data(), ynew_.data());
    rhs_(t + h, ynew_.data(), k_[6].data());  // FSAL
    st.rhs_evals += 6;

    zxpay(n, k_[0].data(), 0.0, k_[0].data(), yerr_.data());  // yerr = k1
    kernels::dscal(n, h * e1, yerr_.data());
    zaxpy2(n, h * e3, k_[2].data(), h * e4, k_[3].data(), yerr_.data());
    zaxpy2(n, h * e5, k_[4].data(), h * e6, k_[5].data(), yerr_.data());
    zaxpy(n, h * e7, k_[6].data(), yerr_.data());

    const double err =
        kernels::wrms_norm(n, yerr_.data(), y.data(), ynew_.data(), opt.atol, opt.rtol);

    if (err <= 1.0) {
      t += h;
      y.swap(ynew_);
      k_[0].swap(k_[6]);
      ++st.steps;
      const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h = std::min(h * std::clamp(grow, 0.2, 5.0), h_max);
    } else {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  have_fsal_ = true;
  fsal_t_ = t;
  return st;
}

}  // namespace qheat::ode
