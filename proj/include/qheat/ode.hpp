#pragma once

#include "qheat/kernels.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qheat::ode {

using cplx = std::complex<double>;

struct Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 0.0;  // 0 -> automatic
  double h_max = 0.0;   // 0 -> span
  long max_steps = 50'000'000;
};

struct Stats {
  long steps = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

// Dormand-Prince 5(4) with adaptive step size on a flat complex state.
// rhs(t, y, dydt) fills dydt (length n).
class Dopri5 {
 public:
  using Rhs = std::function<void(double, const cplx*, cplx*)>;

  Dopri5(std::size_t n, Rhs rhs) : n_(n), rhs_(std::move(rhs)) {
    for (auto& k : k_) k.resize(n);
    ytmp_.resize(n);
    yerr_.resize(n);
    ynew_.resize(n);
  }

  // advances y in place from t0 to t1 (t1 > t0)
  Stats integrate(std::vector<cplx>& y, double t0, double t1, const Options& opt);

 private:
  std::size_t n_;
  Rhs rhs_;
  std::vector<cplx> k_[7], ytmp_, yerr_, ynew_;
  bool have_fsal_ = false;
  double fsal_t_ = 0.0;
};

}  // namespace qheat::ode
