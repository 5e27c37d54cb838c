#include "qheat/master_eq.hpp"

#include "qheat/ode.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace qheat::master_eq {

namespace {

const cplx kI(0.0, 1.0);

// dest += scale * kron(l, r), skipping zero entries of l
void accumulate_kron(Mat& dest, const Mat& l, const Mat& r, cplx scale) {
  const Eigen::Index p = r.rows();
  for (Eigen::Index j = 0; j < l.cols(); ++j)
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      const cplx v = l(i, j) * scale;
      if (v == cplx(0.0, 0.0)) continue;
      dest.block(i * p, j * p, p, p) += v * r;
    }
}

void accumulate_dissipator(Mat& dest, const Mat& a, double gamma) {
  const Eigen::Index d = a.rows();
  const Mat ada = a.adjoint() * a;
  accumulate_kron(dest, a.conjugate(), a, gamma);                       // A rho A^dag
  accumulate_kron(dest, Mat::Identity(d, d), ada, -0.5 * gamma);        // -1/2 A^dag A rho
  accumulate_kron(dest, ada.transpose(), Mat::Identity(d, d), -0.5 * gamma);
}

double default_tol(const RVec& evals) {
  const double scale = std::max({std::abs(evals(0)), std::abs(evals(evals.size() - 1)), 1.0});
  return 1e-9 * scale;
}

}  // namespace

std::string to_string(Reference r) {
  return r == Reference::conventional ? "conventional" : "reorganised";
}

std::string to_string(Flavor f) { return f == Flavor::secular_gkls ? "gkls" : "redfield"; }

JumpDecomposition bohr_decompose(const Mat& h_ref, const Mat& s, double degeneracy_tol) {
  if (h_ref.rows() != s.rows())
    throw std::invalid_argument("bohr_decompose: dimension mismatch");
  const auto eig = ops::eig_hermitian(h_ref);
  const int d = static_cast<int>(h_ref.rows());
  const Mat st = eig.vectors.adjoint() * s * eig.vectors;
  const double tol = degeneracy_tol > 0.0 ? degeneracy_tol : default_tol(eig.values);

  struct Gap {
    double w;
    int i, j;
  };
  std::vector<Gap> gaps;
  gaps.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gaps.push_back({eig.values(j) - eig.values(i), i, j});
  std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) { return a.w < b.w; });

  JumpDecomposition out;
  const double s_norm = std::max(s.norm(), 1e-300);
  std::size_t lo = 0;
  while (lo < gaps.size()) {
    std::size_t hi = lo + 1;
    double wsum = gaps[lo].w;
    while (hi < gaps.size() && gaps[hi].w - gaps[hi - 1].w <= tol) {
      wsum += gaps[hi].w;
      ++hi;
    }
    const double w = wsum / static_cast<double>(hi - lo);
    Mat at = Mat::Zero(d, d);
    for (std::size_t k = lo; k < hi; ++k) at(gaps[k].i, gaps[k].j) = st(gaps[k].i, gaps[k].j);
    if (at.norm() > 1e-13 * s_norm) {
      Mat a = eig.vectors * at * eig.vectors.adjoint();
      out.jumps.push_back({std::abs(w) < tol ? 0.0 : w, std::move(a)});
    }
    lo = hi;
  }

  Mat total = Mat::Zero(d, d);
  for (const auto& j : out.jumps) total += j.op;
  if ((total - s).norm() > 1e-12 * std::max(1.0, s_norm) + 1e-12 * d)
    throw std::logic_error("bohr_decompose: jump completeness violated");
  return out;
}

Mat MasterEquation::generator_matrix() const {
  Mat g = ops::hamiltonian_liouvillian(unitary_part);
  for (const auto& dis : per_bath_dissipators) g += dis.matrix();
  return g;
}

Mat MasterEquation::apply_generator(const Mat& rho) const {
  Mat out = -kI * ops::commutator(unitary_part, rho);
  for (const auto& dis : per_bath_dissipators) out += dis.apply(rho);
  return out;
}

MasterEquation build_gkls(const Mat& h_ref, const std::vector<models::Coupling>& couplings,
                          Reference tag, const BuildOptions& opt) {
  const int d = static_cast<int>(h_ref.rows());
  MasterEquation me;
  me.reference = tag;
  me.flavor = Flavor::secular_gkls;
  me.h_ref = h_ref;
  me.dim = d;
  me.lamb_shift = Mat::Zero(d, d);

  for (const auto& c : couplings) {
    if ((c.op - c.op.adjoint()).norm() > 1e-12 * std::max(1.0, c.op.norm()))
      throw std::invalid_argument("build_gkls: coupling operator must be Hermitian");
    const auto jd = bohr_decompose(h_ref, c.op, opt.degeneracy_tol);
    Mat dis = Mat::Zero(d * d, d * d);
    const bool coupled = c.bath.sd.lambda > 0.0;
    for (const auto& jump : jd.jumps) {
      const double gamma = bath::rate(c.bath, jump.frequency);
      if (gamma < 0.0) throw std::logic_error("build_gkls: negative rate");
      accumulate_dissipator(dis, jump.op, gamma);
      if (coupled && opt.include_lamb_shift) {
        const double sw = bath::lamb_coefficient(c.bath, jump.frequency);
        me.lamb_shift += sw * (jump.op.adjoint() * jump.op);
      }
    }
    me.per_bath_dissipators.emplace_back(std::move(dis), d);
  }
  me.unitary_part = opt.lamb_sign == LambSign::minus ? Mat(h_ref - me.lamb_shift)
                                                     : Mat(h_ref + me.lamb_shift);
  return me;
}

MasterEquation build_redfield(const Mat& h_ref,
                              const std::vector<models::Coupling>& couplings,
                              Reference tag, const BuildOptions& opt) {
  const int d = static_cast<int>(h_ref.rows());
  MasterEquation me;
  me.reference = tag;
  me.flavor = Flavor::redfield;
  me.h_ref = h_ref;
  me.dim = d;
  me.lamb_shift = Mat::Zero(d, d);

  for (const auto& c : couplings) {
    if ((c.op - c.op.adjoint()).norm() > 1e-12 * std::max(1.0, c.op.norm()))
      throw std::invalid_argument("build_redfield: coupling operator must be Hermitian");
    const auto jd = bohr_decompose(h_ref, c.op, opt.degeneracy_tol);
    const bool coupled = c.bath.sd.lambda > 0.0;

    // one-sided coefficients Gamma(w) = gamma(w)/2 + i S(w); the w' sum in
    // the double-frequency tensor telescopes to S, leaving
    //   R rho = [Lam rho, S] + [S, rho Lam^dag].
    Mat lam = Mat::Zero(d, d);
    for (const auto& jump : jd.jumps) {
      cplx g(0.5 * bath::rate(c.bath, jump.frequency), 0.0);
      if (coupled && opt.include_lamb_shift) {
        const double sw = bath::lamb_coefficient(c.bath, jump.frequency);
        if (opt.absorb_lamb_shift)
          g.imag(sw);
        else
          me.lamb_shift += sw * (jump.op.adjoint() * jump.op);
      }
      lam += g * jump.op;
    }

    Mat dis = Mat::Zero(d * d, d * d);
    const Mat lam_adj = lam.adjoint();
    accumulate_kron(dis, c.op.transpose(), lam, 1.0);              // Lam rho S
    accumulate_kron(dis, Mat::Identity(d, d), Mat(c.op * lam), -1.0);   // -S Lam rho
    accumulate_kron(dis, lam_adj.transpose(), c.op, 1.0);          // S rho Lam^dag
    accumulate_kron(dis, Mat(lam_adj * c.op).transpose(), Mat::Identity(d, d), -1.0);
    me.per_bath_dissipators.emplace_back(std::move(dis), d);
  }
  me.unitary_part = opt.lamb_sign == LambSign::minus ? Mat(h_ref - me.lamb_shift)
                                                     : Mat(h_ref + me.lamb_shift);
  return me;
}

MasterEquation build_for_model(const models::SystemModel& model, Reference ref,
                               Flavor flavor, const BuildOptions& opt) {
  const Mat h = ref == Reference::conventional ? model.h_phys() : model.h_reorganised();
  return flavor == Flavor::secular_gkls ? build_gkls(h, model.couplings, ref, opt)
                                        : build_redfield(h, model.couplings, ref, opt);
}

SteadyState steady_state(const MasterEquation& me, int svd_limit) {
  const int d = me.dim;
  const int n = d * d;
  const Mat g = me.generator_matrix();
  SteadyState out;
  Vec v;

  if (n <= svd_limit) {
    Eigen::BDCSVD<Mat> svd(g, Eigen::ComputeFullV);
    v = svd.matrixV().col(n - 1);
    out.sigma2 = svd.singularValues()(n - 2);
    out.method = "svd";
  } else {
    const double scale = g.cwiseAbs().maxCoeff();
    const double eps = 1e-14 * scale;
    Mat b = g;
    b.diagonal().array() += eps;
    Eigen::PartialPivLU<Mat> lu(b);

    Mat id = Mat::Identity(d, d) / static_cast<double>(d);
    v = Eigen::Map<const Vec>(id.data(), n);
    for (int it = 0; it < 3; ++it) {
      v = lu.solve(v);
      v.normalize();
    }

    // deflated power iteration on (B^dag B)^-1 for a sigma_2 estimate
    std::mt19937 rng(12345);
    std::normal_distribution<double> dist;
    Vec w(n);
    for (int i = 0; i < n; ++i) w(i) = cplx(dist(rng), dist(rng));
    w -= v * (v.dot(w));
    w.normalize();
    double growth = 0.0;
    for (int it = 0; it < 6; ++it) {
      Vec u = lu.adjoint().solve(w);
      u = lu.solve(u);
      u -= v * (v.dot(u));
      growth = u.norm();
      if (growth == 0.0) break;
      w = u / growth;
    }
    out.sigma2 = growth > 0.0 ? 1.0 / std::sqrt(growth) : 0.0;
    out.method = "lu";
  }

  Mat rho = Eigen::Map<const Mat>(v.data(), d, d);
  rho = ops::hermitize(rho);
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-8 * rho.norm() * std::sqrt(static_cast<double>(d)))
    throw std::runtime_error("steady_state: kernel vector is traceless");
  rho /= tr;

  out.rho = rho;
  const Mat resid = me.apply_generator(rho);
  out.residual = resid.norm();
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  if (out.sigma2 <= 1e-8)
    throw std::runtime_error("steady_state: generator kernel is (near-)degenerate, "
                             "multiple fixed points");
  return out;
}

PropagationResult propagate(const MasterEquation& me, const Mat& rho0,
                            const std::vector<double>& t_grid, double rtol, double atol) {
  const int d = me.dim;
  if (rho0.rows() != d || rho0.cols() != d)
    throw std::invalid_argument("propagate: state dimension mismatch");
  if (t_grid.empty() || t_grid.front() < 0.0 ||
      !std::is_sorted(t_grid.begin(), t_grid.end()))
    throw std::invalid_argument("propagate: t_grid must ascend from 0");

  const Mat g = me.generator_matrix();
  const int n = d * d;
  ode::Dopri5 stepper(n, [&g, n](double, const cplx* y, cplx* dy) {
    Eigen::Map<const Vec> yv(y, n);
    Eigen::Map<Vec> dyv(dy, n);
    dyv.noalias() = g * yv;
  });

  std::vector<cplx> y(rho0.data(), rho0.data() + n);
  ode::Options opt;
  opt.rtol = rtol;
  opt.atol = atol;

  PropagationResult res;
  double t = 0.0;
  for (double tk : t_grid) {
    if (tk > t) {
      const auto st = stepper.integrate(y, t, tk, opt);
      res.steps += st.steps;
      t = tk;
    }
    Mat rho = Eigen::Map<const Mat>(y.data(), d, d);
    res.max_herm_drift = std::max(res.max_herm_drift, 0.5 * (rho - rho.adjoint()).norm());
    res.max_trace_drift =
        std::max(res.max_trace_drift, std::abs(rho.trace() - cplx(1.0, 0.0)));
    res.states.push_back(ops::hermitize(rho));
  }
  if (res.max_trace_drift > 1e-9)
    throw std::runtime_error("propagate: trace drift exceeded 1e-9");
  return res;
}

Mat mean_force_classical_state(const Mat& h_s,
                               const std::vector<std::pair<double, Mat>>& couplings,
                               double temperature) {
  Mat h = h_s;
  for (const auto& [q, s] : couplings) h -= q * (s * s);
  return ops::gibbs_state(h, temperature);
}

}  // namespace qheat::master_eq
