#pragma once

#include <complex>
#include <cstddef>

// Small complex-array kernels used in the hot loops (HEOM right-hand side,
// Runge-Kutta stage updates, error norms).  A scalar reference implementation
// always exists; an AVX2/FMA variant is selected at runtime when the CPU
// supports it.  Both variants are exported so the equivalence tests can
// compare them directly.

namespace qheat::kernels {

using cplx = std::complex<double>;

// y[i] += a * x[i]
void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y);

// y[i] += a1 * x1[i] + a2 * x2[i]
void zaxpy2(std::size_t n, cplx a1, const cplx* x1, cplx a2, const cplx* x2, cplx* y);

// y[i] = x[i] + a * k[i]
void zxpay(std::size_t n, const cplx* x, cplx a, const cplx* k, cplx* y);

// x[i] *= a
void dscal(std::size_t n, double a, cplx* x);

// sum_i |x[i]|^2
double nrm2sq(std::size_t n, const cplx* x);

// sqrt( (1/n) sum_i |e[i]|^2 / (atol + rtol*max(|ya[i]|, |yb[i]|))^2 )
// where |.| of a complex entry is max(|re|, |im|) (cheap, controller-grade).
double wrms_norm(std::size_t n, const cplx* e, const cplx* ya, const cplx* yb,
                 double atol, double rtol);

// Name of the implementation the dispatcher picked ("avx2" or "scalar").
const char* active_isa();

// Force the scalar path (used by the equivalence tests); returns the
// previous setting.
bool force_scalar(bool on);

namespace ref {
void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
void zaxpy2(std::size_t n, cplx a1, const cplx* x1, cplx a2, const cplx* x2, cplx* y);
void zxpay(std::size_t n, const cplx* x, cplx a, const cplx* k, cplx* y);
void dscal(std::size_t n, double a, cplx* x);
double nrm2sq(std::size_t n, const cplx* x);
double wrms_norm(std::size_t n, const cplx* e, const cplx* ya, const cplx* yb,
                 double atol, double rtol);
}  // namespace ref

namespace avx2 {
bool available();
void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
void zaxpy2(std::size_t n, cplx a1, const cplx* x1, cplx a2, const cplx* x2, cplx* y);
void zxpay(std::size_t n, const cplx* x, cplx a, const cplx* k, cplx* y);
void dscal(std::size_t n, double a, cplx* x);
double nrm2sq(std::size_t n, const cplx* x);
double wrms_norm(std::size_t n, const cplx* e, const cplx* ya, const cplx* yb,
                 double atol, double rtol);
}  // namespace avx2

}  // namespace qheat::kernels
