#include "qheat/heom.hpp"

#include "qheat/kernels.hpp"
#include "qheat/ode.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

namespace qheat::heom {

namespace {

const cplx kI(0.0, 1.0);

// compositions of total tier t over m slots, tier-by-tier, lexicographic
void enumerate_tier(int m, int t, std::vector<std::uint8_t>& cur, int slot, int left,
                    std::vector<std::uint8_t>& out) {
  if (slot == m - 1) {
    cur[slot] = static_cast<std::uint8_t>(left);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int k = left; k >= 0; --k) {
    cur[slot] = static_cast<std::uint8_t>(k);
    enumerate_tier(m, t, cur, slot + 1, left - k, out);
  }
}

struct KeyHash {
  std::size_t operator()(const std::string& s) const noexcept {
    return std::hash<std::string>{}(s);
  }
};

}  // namespace

std::size_t lattice_size(int n_slots, int depth) {
  // C(n_slots + depth, depth)
  long double v = 1.0L;
  for (int k = 1; k <= depth; ++k)
    v = v * static_cast<long double>(n_slots + k) / static_cast<long double>(k);
  if (v > 4e18L) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(v + 0.5L);
}

Hierarchy::Hierarchy(Mat h_sys, std::vector<Mat> couplings,
                     std::vector<bath::ExponentialSeries> series, const HeomConfig& cfg)
    : cfg_(cfg), h_(std::move(h_sys)), couplings_(std::move(couplings)) {
  d_ = static_cast<int>(h_.rows());
  dd_ = d_ * d_;
  depth_ = cfg.depth;
  if (depth_ < 0) throw std::invalid_argument("Hierarchy: depth must be >= 0");
  if (h_.cols() != d_) throw std::invalid_argument("Hierarchy: H must be square");
  if (couplings_.size() != series.size())
    throw std::invalid_argument("Hierarchy: one exponential series per coupling");
  for (const auto& s : couplings_) {
    if (s.rows() != d_ || s.cols() != d_)
      throw std::invalid_argument("Hierarchy: coupling dimension mismatch");
    if ((s - s.adjoint()).norm() > 1e-12 * std::max(1.0, s.norm()))
      throw std::invalid_argument("Hierarchy: couplings must be Hermitian");
  }
  for (std::size_t i = 0; i < couplings_.size(); ++i)
    for (std::size_t j = i + 1; j < couplings_.size(); ++j)
      if (ops::commutator(couplings_[i], couplings_[j]).norm() >
          1e-12 * std::max(1.0, couplings_[i].norm() * couplings_[j].norm()))
        throw std::invalid_argument(
            "Hierarchy: [S_i, S_j] != 0; currents would be ambiguous");

  auto collect = [](const Mat& m, std::vector<Nz>& out) {
    for (int j = 0; j < m.cols(); ++j)
      for (int i = 0; i < m.rows(); ++i)
        if (m(i, j) != cplx(0.0, 0.0)) out.push_back({i, j, m(i, j)});
  };
  h_nz_.clear();
  collect(h_, h_nz_);
  s_nz_.resize(couplings_.size());
  ss_nz_.resize(couplings_.size());
  for (std::size_t b = 0; b < couplings_.size(); ++b) {
    collect(couplings_[b], s_nz_[b]);
    collect(Mat(couplings_[b] * couplings_[b]), ss_nz_[b]);
  }

  // hierarchy slots: every retained exponent of every bath
  tail_.assign(couplings_.size(), 0.0);
  for (std::size_t b = 0; b < series.size(); ++b) {
    if (cfg.terminator) tail_[b] = series[b].markovian_tail;
    for (const auto& term : series[b].terms) {
      if (term.decay.real() <= 0.0)
        throw std::invalid_argument("Hierarchy: exponential decays must have Re > 0");
      if (std::abs(term.amplitude) == 0.0) continue;  // decoupled mode carries nothing
      slots_.push_back({static_cast<int>(b), term.amplitude, term.decay.real(),
                        std::sqrt(std::abs(term.amplitude))});
    }
  }
  n_slots_ = static_cast<int>(slots_.size());

  const std::size_t count = lattice_size(n_slots_, depth_);
  const std::size_t bytes = count * static_cast<std::size_t>(dd_) * 16 * 14;
  if (bytes > cfg.memory_budget_mb * std::size_t(1) * 1024 * 1024)
    throw std::runtime_error(
        "Hierarchy: estimated memory " + std::to_string(bytes / (1024 * 1024)) +
        " MB exceeds the budget (" + std::to_string(cfg.memory_budget_mb) +
        " MB; raise QHEAT_HEOM_MEM_MB or reduce N_k/N_C)");

  // enumerate tier by tier so the zero index is first and tier-1 ADOs follow
  // in slot order
  multi_.clear();
  multi_.reserve(count * std::max(1, n_slots_));
  if (n_slots_ == 0) {
    n_ado_ = 1;
    decay_.assign(1, 0.0);
    up_.clear();
    down_.clear();
    return;
  }
  std::vector<std::uint8_t> cur(n_slots_, 0);
  for (int t = 0; t <= depth_; ++t) enumerate_tier(n_slots_, t, cur, 0, t, multi_);
  n_ado_ = static_cast<int>(multi_.size() / n_slots_);

  std::unordered_map<std::string, int, KeyHash> index;
  index.reserve(n_ado_ * 2);
  for (int m = 0; m < n_ado_; ++m)
    index.emplace(std::string(reinterpret_cast<const char*>(&multi_[std::size_t(m) * n_slots_]),
                              n_slots_),
                  m);

  up_.assign(static_cast<std::size_t>(n_ado_) * n_slots_, -1);
  down_.assign(static_cast<std::size_t>(n_ado_) * n_slots_, -1);
  decay_.assign(n_ado_, 0.0);
  std::vector<std::uint8_t> key(n_slots_);
  for (int m = 0; m < n_ado_; ++m) {
    const std::uint8_t* nm = &multi_[std::size_t(m) * n_slots_];
    int tier = 0;
    double dec = 0.0;
    for (int s = 0; s < n_slots_; ++s) {
      tier += nm[s];
      dec += nm[s] * slots_[s].nu;
    }
    decay_[m] = dec;
    for (int s = 0; s < n_slots_; ++s) {
      std::memcpy(key.data(), nm, n_slots_);
      if (tier < depth_) {
        key[s] = static_cast<std::uint8_t>(nm[s] + 1);
        auto it = index.find(
            std::string(reinterpret_cast<const char*>(key.data()), n_slots_));
        if (it != index.end()) up_[std::size_t(m) * n_slots_ + s] = it->second;
        key[s] = nm[s];
      }
      if (nm[s] > 0) {
        key[s] = static_cast<std::uint8_t>(nm[s] - 1);
        auto it = index.find(
            std::string(reinterpret_cast<const char*>(key.data()), n_slots_));
        if (it != index.end()) down_[std::size_t(m) * n_slots_ + s] = it->second;
        key[s] = nm[s];
      }
    }
  }
}

// O(i, j) += coeff * sum_k S(i, k) A(k, j)   [S given as a nonzero list]
void Hierarchy::accum_left_(cplx* o, cplx coeff, const std::vector<Nz>& nz,
                            const cplx* a) const {
  for (const auto& e : nz) {
    const cplx cv = coeff * e.v;
    const cplx* ac = a + e.col;
    cplx* oc = o + e.row;
    for (int j = 0; j < d_; ++j) oc[j * d_] += cv * ac[j * d_];
  }
}

void Hierarchy::accum_right_(cplx* o, cplx coeff, const cplx* a,
                             const std::vector<Nz>& nz) const {
  for (const auto& e : nz)
    kernels::zaxpy(d_, coeff * e.v, a + std::size_t(e.row) * d_,
                   o + std::size_t(e.col) * d_);
}

void Hierarchy::apply(const cplx* in, cplx* out) const {
  const int dd = dd_;
  const int nb = n_baths();
#pragma omp parallel
  {
    std::vector<cplx> scratch(dd);
#pragma omp for schedule(static)
    for (int m = 0; m < n_ado_; ++m) {
      const cplx* A = in + std::size_t(m) * dd;
      cplx* O = out + std::size_t(m) * dd;
      const double dec = decay_[m];
      for (int p = 0; p < dd; ++p) O[p] = -dec * A[p];
      // -i [H, A]
      accum_left_(O, -kI, h_nz_, A);
      accum_right_(O, kI, A, h_nz_);
      // Markovian tail of the dropped Matsubara modes: -R [S, [S, A]]
      for (int b = 0; b < nb; ++b) {
        const double r = tail_[b];
        if (r == 0.0) continue;
        accum_left_(O, -r, ss_nz_[b], A);
        accum_right_(O, -r, A, ss_nz_[b]);
        std::fill(scratch.begin(), scratch.end(), cplx(0.0, 0.0));
        accum_left_(scratch.data(), 1.0, s_nz_[b], A);
        accum_right_(O, 2.0 * r, scratch.data(), s_nz_[b]);
      }
      if (n_slots_ == 0) continue;
      const std::uint8_t* nm = &multi_[std::size_t(m) * n_slots_];
      for (int s = 0; s < n_slots_; ++s) {
        const Slot& sl = slots_[s];
        const std::int32_t iu = up_[std::size_t(m) * n_slots_ + s];
        if (iu >= 0) {
          const cplx u = -kI * (std::sqrt(nm[s] + 1.0) * sl.sqrt_abs_c);
          const cplx* Au = in + std::size_t(iu) * dd;
          accum_left_(O, u, s_nz_[sl.bath], Au);
          accum_right_(O, -u, Au, s_nz_[sl.bath]);
        }
        const std::int32_t idn = down_[std::size_t(m) * n_slots_ + s];
        if (idn >= 0) {
          const double f = std::sqrt(static_cast<double>(nm[s])) / sl.sqrt_abs_c;
          const cplx* Ad = in + std::size_t(idn) * dd;
          accum_left_(O, -kI * f * sl.c, s_nz_[sl.bath], Ad);
          accum_right_(O, kI * f * std::conj(sl.c), Ad, s_nz_[sl.bath]);
        }
      }
    }
  }
}

Mat Hierarchy::physical(const std::vector<cplx>& state) const {
  return Eigen::Map<const Mat>(state.data(), d_, d_);
}

std::vector<cplx> Hierarchy::initial_state(const Mat& rho0) const {
  if (rho0.rows() != d_ || rho0.cols() != d_)
    throw std::invalid_argument("initial_state: dimension mismatch");
  std::vector<cplx> y(state_size(), cplx(0.0, 0.0));
  std::copy(rho0.data(), rho0.data() + dd_, y.begin());
  return y;
}

double Hierarchy::current(const std::vector<cplx>& state, int bath_index) const {
  if (bath_index < 0 || bath_index >= n_baths())
    throw std::invalid_argument("current: bath index out of range");
  const Mat w = couplings_[bath_index] * h_ - h_ * couplings_[bath_index];  // [S, H]
  bool have_tier1 = false;
  Mat rho_b = Mat::Zero(d_, d_);
  for (int s = 0; s < n_slots_; ++s) {
    if (slots_[s].bath != bath_index) continue;
    const std::int32_t t1 = up_.empty() ? -1 : up_[s];  // neighbors of ADO 0
    if (t1 < 0) continue;
    have_tier1 = true;
    rho_b += slots_[s].sqrt_abs_c *
             Eigen::Map<const Mat>(state.data() + std::size_t(t1) * dd_, d_, d_);
  }
  bool bath_has_slots = false;
  for (const auto& sl : slots_) bath_has_slots |= (sl.bath == bath_index);
  if (bath_has_slots && !have_tier1)
    throw std::runtime_error("current: no tier-1 ADOs (depth 0 hierarchy)");

  double q = std::real(kI * (w * rho_b).trace());
  if (tail_[bath_index] != 0.0) {
    // adiabatically eliminated modes contribute rho_{e_k} ~ -i (c_k/nu_k) [S, rho_0],
    // i.e. R * tr([[S,H],S] rho_0) on top of the retained tier-1 sum
    const Mat rho0 = Eigen::Map<const Mat>(state.data(), d_, d_);
    const Mat ws = w * couplings_[bath_index] - couplings_[bath_index] * w;
    q += tail_[bath_index] * std::real((ws * rho0).trace());
  }
  return q;
}

void Hierarchy::visit_triplets(const std::function<void(int, int, cplx)>& emit) const {
  auto idx = [this](int m, int i, int j) {
    return static_cast<int>(std::size_t(m) * dd_ + i + j * d_);
  };
  auto emit_left = [&](int mrow, int mcol, cplx coeff, const std::vector<Nz>& nz) {
    for (const auto& e : nz)
      for (int j = 0; j < d_; ++j)
        emit(idx(mrow, e.row, j), idx(mcol, e.col, j), coeff * e.v);
  };
  auto emit_right = [&](int mrow, int mcol, cplx coeff, const std::vector<Nz>& nz) {
    for (const auto& e : nz)
      for (int i = 0; i < d_; ++i)
        emit(idx(mrow, i, e.col), idx(mcol, i, e.row), coeff * e.v);
  };

  for (int m = 0; m < n_ado_; ++m) {
    for (int p = 0; p < dd_; ++p) {
      const int q = idx(m, 0, 0) + p;
      emit(q, q, cplx(-decay_[m], 0.0));
    }
    emit_left(m, m, -kI, h_nz_);
    emit_right(m, m, kI, h_nz_);
    for (int b = 0; b < n_baths(); ++b) {
      const double r = tail_[b];
      if (r == 0.0) continue;
      emit_left(m, m, -r, ss_nz_[b]);
      emit_right(m, m, -r, ss_nz_[b]);
      for (const auto& e1 : s_nz_[b])
        for (const auto& e2 : s_nz_[b])
          emit(idx(m, e1.row, e2.col), idx(m, e1.col, e2.row), 2.0 * r * e1.v * e2.v);
    }
    if (n_slots_ == 0) continue;
    const std::uint8_t* nm = &multi_[std::size_t(m) * n_slots_];
    for (int s = 0; s < n_slots_; ++s) {
      const Slot& sl = slots_[s];
      const std::int32_t iu = up_[std::size_t(m) * n_slots_ + s];
      if (iu >= 0) {
        const cplx u = -kI * (std::sqrt(nm[s] + 1.0) * sl.sqrt_abs_c);
        emit_left(m, iu, u, s_nz_[sl.bath]);
        emit_right(m, iu, -u, s_nz_[sl.bath]);
      }
      const std::int32_t idn = down_[std::size_t(m) * n_slots_ + s];
      if (idn >= 0) {
        const double f = std::sqrt(static_cast<double>(nm[s])) / sl.sqrt_abs_c;
        emit_left(m, idn, -kI * f * sl.c, s_nz_[sl.bath]);
        emit_right(m, idn, kI * f * std::conj(sl.c), s_nz_[sl.bath]);
      }
    }
  }
}

std::vector<Hierarchy::Triplet> Hierarchy::assemble() const {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(n_ado_) *
               (dd_ + 4 * h_nz_.size() * d_ + 8 * n_slots_ * d_));
  visit_triplets([&trip](int r, int c, cplx v) { trip.push_back({r, c, v}); });
  return trip;
}

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;

SpMat bordered_matrix(const Hierarchy& h) {
  const std::size_t n = h.state_size();
  const int d = h.sys_dim();
  std::vector<Eigen::Triplet<cplx>> t;
  h.visit_triplets([&t](int r, int c, cplx v) {
    if (r != 0) t.emplace_back(r, c, v);
  });
  for (int i = 0; i < d; ++i) t.emplace_back(0, i * (d + 1), cplx(1.0, 0.0));
  SpMat a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

struct BorderedOp {
  const Hierarchy* h;
  void apply(const Vec& x, Vec& y) const {
    h->apply(x.data(), y.data());
    const int d = h->sys_dim();
    cplx tr(0.0, 0.0);
    for (int i = 0; i < d; ++i) tr += x(i * (d + 1));
    y(0) = tr;
  }
};

}  // namespace

SteadyResult steady_state(const Hierarchy& h) {
  const std::size_t n = h.state_size();
  const int d = h.sys_dim();
  SteadyResult out;

  Vec x;
  if (n <= h.config().direct_limit) {
    SpMat a = bordered_matrix(h);
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("heom::steady_state: sparse LU factorisation failed "
                               "(degenerate hierarchy kernel?)");
    Vec b = Vec::Zero(n);
    b(0) = 1.0;
    x = lu.solve(b);
    out.method = "sparse-lu";
  } else {
    // matrix-free BiCGSTAB, Jacobi preconditioner with an exact solve of the
    // physical block (the slow subspace lives there)
    BorderedOp op{&h};
    const int dd = d * d;
    Vec diag = Vec::Zero(n);
    Mat block0 = Mat::Zero(dd, dd);
    h.visit_triplets([&](int r, int c, cplx v) {
      if (r == c && r != 0) diag(r) += v;
      if (r < dd && c < dd && r != 0) block0(r, c) += v;
    });
    diag(0) = cplx(1.0, 0.0);
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(diag(i)) < 1e-12) diag(i) = cplx(1.0, 0.0);
    for (int i = 0; i < d; ++i) block0(0, i * (d + 1)) += 1.0;
    Eigen::PartialPivLU<Mat> block0_lu(block0);

    auto precond = [&](const Vec& r, Vec& z) {
      z = r.cwiseQuotient(diag);
      z.head(dd) = block0_lu.solve(r.head(dd));
    };

    Vec b = Vec::Zero(n);
    b(0) = 1.0;
    x = Vec::Zero(n);
    // trace-normalised mixed state as the starting guess
    for (int i = 0; i < d; ++i) x(i * (d + 1)) = 1.0 / d;

    Vec r(n), r0(n), p(n), v(n), s(n), t(n), y(n), z(n);
    op.apply(x, r);
    r = b - r;
    r0 = r;
    cplx rho(1.0, 0.0), alpha(1.0, 0.0), w(1.0, 0.0);
    p.setZero();
    v.setZero();
    const double tol = std::max(h.config().steady_tol, 1e-13);
    int it = 0;
    const int max_it = 4000;
    int restarts = 0;
    while (r.norm() > tol && it < max_it) {
      const cplx rho_new = r0.dot(r);
      if (std::abs(rho_new) < 1e-300) {
        if (++restarts > 4)
          throw std::runtime_error("heom::steady_state: BiCGSTAB breakdown");
        op.apply(x, r);
        r = b - r;
        r0 = r;
        rho = alpha = w = cplx(1.0, 0.0);
        p.setZero();
        v.setZero();
        continue;
      }
      const cplx beta = (rho_new / rho) * (alpha / w);
      rho = rho_new;
      p = r + beta * (p - w * v);
      precond(p, y);
      op.apply(y, v);
      alpha = rho / r0.dot(v);
      s = r - alpha * v;
      precond(s, z);
      op.apply(z, t);
      const double tt = t.squaredNorm();
      w = tt > 0.0 ? t.dot(s) / tt : cplx(0.0, 0.0);
      x += alpha * y + w * z;
      r = s - w * t;
      ++it;
    }
    out.iterations = it;
    if (r.norm() > tol * 100.0)
      throw std::runtime_error("heom::steady_state: BiCGSTAB did not converge, residual " +
                               std::to_string(r.norm()));
    out.method = "bicgstab";
  }

  // hermitise the physical block and normalise the trace across the state
  Mat rho_phys = Eigen::Map<const Mat>(x.data(), d, d);
  const cplx tr = rho_phys.trace();
  if (std::abs(tr) < 1e-10)
    throw std::runtime_error("heom::steady_state: stationary state has zero trace");
  x /= tr;

  std::vector<cplx> state(x.data(), x.data() + n);
  Vec resid(n);
  h.apply(x.data(), resid.data());
  out.residual = resid.norm();

  rho_phys = Eigen::Map<const Mat>(state.data(), d, d);
  out.rho = ops::hermitize(rho_phys);
  out.state = std::move(state);
  return out;
}

DynamicsResult propagate(const Hierarchy& h, const Mat& rho0,
                         const std::vector<double>& t_grid) {
  if (t_grid.empty() || t_grid.front() < 0.0 ||
      !std::is_sorted(t_grid.begin(), t_grid.end()))
    throw std::invalid_argument("heom::propagate: t_grid must ascend from 0");
  const std::size_t n = h.state_size();
  std::vector<cplx> y = h.initial_state(rho0);

  ode::Dopri5 stepper(n, [&h](double, const cplx* in, cplx* out) { h.apply(in, out); });
  ode::Options opt;
  opt.rtol = h.config().rtol;
  opt.atol = h.config().atol;

  DynamicsResult res;
  double t = 0.0;
  for (double tk : t_grid) {
    if (tk > t) {
      const auto st = stepper.integrate(y, t, tk, opt);
      res.steps += st.steps;
      t = tk;
    }
    Mat rho = h.physical(y);
    res.max_herm_drift = std::max(res.max_herm_drift, 0.5 * (rho - rho.adjoint()).norm());
    res.max_trace_drift =
        std::max(res.max_trace_drift, std::abs(rho.trace() - cplx(1.0, 0.0)));
    res.times.push_back(tk);
    res.states.push_back(ops::hermitize(rho));
  }
  return res;
}

ConvergenceReport convergence_sweep(
    const std::function<double(const HeomConfig&)>& observable, HeomConfig base,
    double tol) {
  ConvergenceReport rep;
  const double v0 = observable(base);
  rep.entries.push_back({"base", base.n_matsubara, base.depth, v0, 0.0});

  HeomConfig more_k = base;
  more_k.n_matsubara += 2;
  HeomConfig more_c = base;
  more_c.depth += 2;
  const double scale = std::max(std::abs(v0), 1e-300);
  for (const auto& [name, cfg] :
       {std::pair<std::string, HeomConfig>{"n_matsubara+2", more_k},
        std::pair<std::string, HeomConfig>{"depth+2", more_c}}) {
    const double v = observable(cfg);
    const double rel = std::abs(v - v0) / scale;
    rep.entries.push_back({name, cfg.n_matsubara, cfg.depth, v, rel});
    rep.max_rel_change = std::max(rep.max_rel_change, rel);
  }
  rep.converged = rep.max_rel_change < tol;
  return rep;
}

}  // namespace qheat::heom
