#pragma once

#include <complex>
#include <functional>

namespace qheat::quad {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_segments = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  long evals = 0;
  bool converged = false;
};

struct CResult {
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;
  long evals = 0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod 7-15 on [a, b].
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

CResult integrate_c(const std::function<std::complex<double>(double)>& f, double a,
                    double b, const Options& opt = {});

// [0, inf) with the substitution w = scale * tan(theta), theta in [0, pi/2).
Result integrate_semi_inf(const std::function<double(double)>& f, double scale,
                          const Options& opt = {});

// PV int_{omega-w}^{omega+w} f(x)/(x-omega) dx on a symmetric window via
// singularity subtraction; the log remainder vanishes by symmetry.  fd_step
// is the step of the central difference used exactly at x = omega.
Result pv_symmetric_window(const std::function<double(double)>& f, double omega,
                           double window, double fd_step, const Options& opt = {});

}  // namespace qheat::quad
