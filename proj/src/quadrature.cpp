#include "qheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace qheat::quad {

namespace {

// Gauss-Kronrod 7-15 abscissae/weights (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Panel {
  double a, b;
  T value;
  double error;
};

template <typename T, typename F>
Panel<T> gk15(const F& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fv[15];
  for (int j = 0; j < 7; ++j) {
    fv[j] = f(c - h * kXgk[j]);
    fv[14 - j] = f(c + h * kXgk[j]);
  }
  fv[7] = f(c);
  evals += 15;
  T resk = kWgk[7] * fv[7];
  T resg = kWg[3] * fv[7];
  for (int j = 0; j < 7; ++j) resk += kWgk[j] * (fv[j] + fv[14 - j]);
  for (int j = 0; j < 3; ++j) resg += kWg[j] * (fv[2 * j + 1] + fv[13 - 2 * j]);
  const double err = std::abs(std::abs(resk - resg)) * h;
  return {a, b, resk * h, err};
}

template <typename T, typename F>
void adapt(const F& f, double a, double b, const Options& opt, T& value, double& error,
           long& evals, bool& converged) {
  std::vector<Panel<T>> panels;
  panels.push_back(gk15<T>(f, a, b, evals));
  auto total = [&panels]() {
    T v = panels[0].value * 0.0;
    double e = 0.0;
    for (const auto& p : panels) {
      v += p.value;
      e += p.error;
    }
    return std::pair<T, double>(v, e);
  };
  while (static_cast<int>(panels.size()) < opt.max_segments) {
    auto [v, e] = total();
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(std::abs(v)));
    if (e <= target) {
      value = v;
      error = e;
      converged = true;
      return;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].error > panels[worst].error) worst = i;
    const Panel<T> p = panels[worst];
    const double m = 0.5 * (p.a + p.b);
    if (m <= p.a || m >= p.b) break;  // interval exhausted at double precision
    panels[worst] = gk15<T>(f, p.a, m, evals);
    panels.push_back(gk15<T>(f, m, p.b, evals));
  }
  auto [v, e] = total();
  value = v;
  error = e;
  converged = e <= std::max(opt.abs_tol, opt.rel_tol * std::abs(std::abs(v)));
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt) {
  Result r;
  if (a == b) {
    r.converged = true;
    return r;
  }
  adapt<double>(f, a, b, opt, r.value, r.error, r.evals, r.converged);
  return r;
}

CResult integrate_c(const std::function<std::complex<double>(double)>& f, double a,
                    double b, const Options& opt) {
  CResult r;
  if (a == b) {
    r.converged = true;
    return r;
  }
  adapt<std::complex<double>>(f, a, b, opt, r.value, r.error, r.evals, r.converged);
  return r;
}

Result integrate_semi_inf(const std::function<double(double)>& f, double scale,
                          const Options& opt) {
  const double half_pi = std::acos(-1.0) / 2.0;
  auto g = [&f, scale](double theta) {
    const double c = std::cos(theta);
    if (c <= 0.0) return 0.0;
    const double w = scale * std::tan(theta);
    return f(w) * scale / (c * c);
  };
  return integrate(g, 0.0, half_pi, opt);
}

Result pv_symmetric_window(const std::function<double(double)>& f, double omega,
                           double window, double fd_step, const Options& opt) {
  const double f0 = f(omega);
  auto g = [&](double x) {
    const double d = x - omega;
    if (std::abs(d) < fd_step) {
      // limit of (f(x)-f(omega))/(x-omega): central difference at omega
      return (f(omega + fd_step) - f(omega - fd_step)) / (2.0 * fd_step);
    }
    return (f(x) - f0) / d;
  };
  return integrate(g, omega - window, omega + window, opt);
}

}  // namespace qheat::quad
