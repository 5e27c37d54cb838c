#include "qheat/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace qheat::kernels {

namespace ref {

void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void zaxpy2(std::size_t n, cplx a1, const cplx* x1, cplx a2, const cplx* x2, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a1 * x1[i] + a2 * x2[i];
}

void zxpay(std::size_t n, const cplx* x, cplx a, const cplx* k, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * k[i];
}

void dscal(std::size_t n, double a, cplx* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double nrm2sq(std::size_t n, const cplx* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i]);
  return s;
}

double wrms_norm(std::size_t n, const cplx* e, const cplx* ya, const cplx* yb,
                 double atol, double rtol) {
  if (n == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ma = std::max(std::abs(ya[i].real()), std::abs(ya[i].imag()));
    const double mb = std::max(std::abs(yb[i].real()), std::abs(yb[i].imag()));
    const double w = atol + rtol * std::max(ma, mb);
    const double ee = std::max(std::abs(e[i].real()), std::abs(e[i].imag()));
    const double q = ee / w;
    s += q * q;
  }
  return std::sqrt(s / static_cast<double>(n));
}

}  // namespace ref

namespace {

std::atomic<bool> g_force_scalar{false};

bool use_avx2() { return !g_force_scalar.load(std::memory_order_relaxed) && avx2::available(); }

}  // namespace

const char* active_isa() { return use_avx2() ? "avx2" : "scalar"; }

bool force_scalar(bool on) { return g_force_scalar.exchange(on); }

void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  use_avx2() ? avx2::zaxpy(n, a, x, y) : ref::zaxpy(n, a, x, y);
}

void zaxpy2(std::size_t n, cplx a1, const cplx* x1, cplx a2, const cplx* x2, cplx* y) {
  use_avx2() ? avx2::zaxpy2(n, a1, x1, a2, x2, y) : ref::zaxpy2(n, a1, x1, a2, x2, y);
}

void zxpay(std::size_t n, const cplx* x, cplx a, const cplx* k, cplx* y) {
  use_avx2() ? avx2::zxpay(n, x, a, k, y) : ref::zxpay(n, x, a, k, y);
}

void dscal(std::size_t n, double a, cplx* x) {
  use_avx2() ? avx2::dscal(n, a, x) : ref::dscal(n, a, x);
}

double nrm2sq(std::size_t n, const cplx* x) {
  return use_avx2() ? avx2::nrm2sq(n, x) : ref::nrm2sq(n, x);
}

double wrms_norm(std::size_t n, const cplx* e, const cplx* ya, const cplx* yb,
                 double atol, double rtol) {
  return use_avx2() ? avx2::wrms_norm(n, e, ya, yb, atol, rtol)
                    : ref::wrms_norm(n, e, ya, yb, atol, rtol);
}

}  // namespace qheat::kernels
