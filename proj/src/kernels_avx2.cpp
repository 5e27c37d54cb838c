// AVX2/FMA variants of the complex-array kernels.  This TU is the only one
// compiled with -mavx2 -mfma; callers must check available() first (the
// dispatcher in kernels.cpp does).

#include "qheat/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace qheat::kernels::avx2 {

bool available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

// One __m256d holds two interleaved complex doubles [re0, im0, re1, im1].
// Complex multiply-accumulate y += a*x:
//   re' = ar*xr - ai*xi,  im' = ar*xi + ai*xr
// done with a lane swap and fmaddsub.
inline __m256d cmul_acc(__m256d acc, __m256d x, __m256d ar, __m256d ai) {
  const __m256d xs = _mm256_permute_pd(x, 0x5);       // [im0, re0, im1, re1]
  const __m256d t = _mm256_mul_pd(ai, xs);            // [ai*im, ai*re, ...]
  return _mm256_add_pd(acc, _mm256_fmaddsub_pd(ar, x, t));
}

}  // namespace

void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  const auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, cmul_acc(yv, xv, ar, ai));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void zaxpy2(std::size_t n, cplx a1, const cplx* x1, cplx a2, const cplx* x2, cplx* y) {
  const __m256d a1r = _mm256_set1_pd(a1.real());
  const __m256d a1i = _mm256_set1_pd(a1.imag());
  const __m256d a2r = _mm256_set1_pd(a2.real());
  const __m256d a2i = _mm256_set1_pd(a2.imag());
  std::size_t i = 0;
  const auto* x1d = reinterpret_cast<const double*>(x1);
  const auto* x2d = reinterpret_cast<const double*>(x2);
  auto* yd = reinterpret_cast<double*>(y);
  for (; i + 2 <= n; i += 2) {
    __m256d v1 = _mm256_loadu_pd(x1d + 2 * i);
    __m256d v2 = _mm256_loadu_pd(x2d + 2 * i);
    __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    yv = cmul_acc(yv, v1, a1r, a1i);
    yv = cmul_acc(yv, v2, a2r, a2i);
    _mm256_storeu_pd(yd + 2 * i, yv);
  }
  for (; i < n; ++i) y[i] += a1 * x1[i] + a2 * x2[i];
}

void zxpay(std::size_t n, const cplx* x, cplx a, const cplx* k, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  const auto* xd = reinterpret_cast<const double*>(x);
  const auto* kd = reinterpret_cast<const double*>(k);
  auto* yd = reinterpret_cast<double*>(y);
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    __m256d kv = _mm256_loadu_pd(kd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, cmul_acc(xv, kv, ar, ai));
  }
  for (; i < n; ++i) y[i] = x[i] + a * k[i];
}

void dscal(std::size_t n, double a, cplx* x) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  auto* xd = reinterpret_cast<double*>(x);
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(xd + 2 * i, _mm256_mul_pd(av, _mm256_loadu_pd(xd + 2 * i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

double nrm2sq(std::size_t n, const cplx* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const auto* xd = reinterpret_cast<const double*>(x);
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(xd + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) s += std::norm(x[i]);
  return s;
}

double wrms_norm(std::size_t n, const cplx* e, const cplx* ya, const cplx* yb,
                 double atol, double rtol) {
  if (n == 0) return 0.0;
  const __m256d vatol = _mm256_set1_pd(atol);
  const __m256d vrtol = _mm256_set1_pd(rtol);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const auto* ed = reinterpret_cast<const double*>(e);
  const auto* yad = reinterpret_cast<const double*>(ya);
  const auto* ybd = reinterpret_cast<const double*>(yb);
  for (; i + 2 <= n; i += 2) {
    __m256d ev = _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(ed + 2 * i));
    __m256d av = _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(yad + 2 * i));
    __m256d bv = _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(ybd + 2 * i));
    // per-complex max over {re, im} via a lane swap
    ev = _mm256_max_pd(ev, _mm256_permute_pd(ev, 0x5));
    av = _mm256_max_pd(av, _mm256_permute_pd(av, 0x5));
    bv = _mm256_max_pd(bv, _mm256_permute_pd(bv, 0x5));
    const __m256d w = _mm256_fmadd_pd(vrtol, _mm256_max_pd(av, bv), vatol);
    const __m256d q = _mm256_div_pd(ev, w);
    acc = _mm256_fmadd_pd(q, q, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  // each complex entry was accumulated twice (both lanes hold the max)
  double s = 0.5 * (lanes[0] + lanes[1] + lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    const double ma = std::max(std::abs(ya[i].real()), std::abs(ya[i].imag()));
    const double mb = std::max(std::abs(yb[i].real()), std::abs(yb[i].imag()));
    const double w = atol + rtol * std::max(ma, mb);
    const double ee = std::max(std::abs(e[i].real()), std::abs(e[i].imag()));
    s += (ee / w) * (ee / w);
  }
  return std::sqrt(s / static_cast<double>(n));
}

}  // namespace qheat::kernels::avx2
