#include "qheat/operators.hpp"

#include <cmath>
#include <limits>

namespace qheat::ops {

namespace {
const cplx kI(0.0, 1.0);
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat spre(const Mat& x) {
  return kron(Mat::Identity(x.rows(), x.cols()), x);
}

Mat spost(const Mat& x) {
  return kron(x.transpose(), Mat::Identity(x.rows(), x.cols()));
}

Mat sandwich(const Mat& a, const Mat& b) { return kron(b.transpose(), a); }

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

Mat anticommutator(const Mat& a, const Mat& b) { return a * b + b * a; }

Mat hamiltonian_liouvillian(const Mat& h) { return -kI * (spre(h) - spost(h)); }

Mat gkls_dissipator(const Mat& a, double gamma) {
  const Mat ada = a.adjoint() * a;
  return gamma * (sandwich(a, a.adjoint()) - 0.5 * (spre(ada) + spost(ada)));
}

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

HermitianOperator HermitianOperator::from(Mat m, double rel_tol) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("HermitianOperator: matrix must be square and non-empty");
  const double scale = std::max(m.norm(), 1e-300);
  if ((m - m.adjoint()).norm() > rel_tol * scale)
    throw std::invalid_argument("HermitianOperator: input is not Hermitian");
  return HermitianOperator(std::move(m));
}

DensityMatrix DensityMatrix::from(Mat m, double herm_tol, double trace_tol,
                                  double psd_tol) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
  const double scale = std::max(m.norm(), 1e-300);
  if ((m - m.adjoint()).norm() > herm_tol * scale)
    throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
  if (std::abs(m.trace() - cplx(1.0, 0.0)) > trace_tol)
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < psd_tol)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  return DensityMatrix(std::move(m));
}

Superoperator::Superoperator(Mat m, int dim) : m_(std::move(m)), dim_(dim) {
  if (m_.rows() != m_.cols() || m_.rows() != static_cast<Eigen::Index>(dim) * dim)
    throw std::invalid_argument("Superoperator: matrix must be dim^2 x dim^2");
}

Mat Superoperator::apply(const Mat& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_)
    throw std::invalid_argument("Superoperator::apply: dimension mismatch");
  const Eigen::Map<const Vec> v(rho.data(), rho.size());
  Vec out = m_ * v;
  return Eigen::Map<const Mat>(out.data(), dim_, dim_);
}

EigH eig_hermitian(const Mat& h, double rel_tol) {
  return eig_hermitian(HermitianOperator::from(h, rel_tol));
}

EigH eig_hermitian(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h.matrix()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed");
  EigH out{es.eigenvalues(), es.eigenvectors()};
  const Mat recon =
      out.vectors * out.values.cast<cplx>().asDiagonal() * out.vectors.adjoint();
  const double scale = std::max(h.matrix().norm(), 1e-300);
  if ((recon - h.matrix()).norm() > 1e-12 * std::max(scale, 1.0))
    throw std::runtime_error("eig_hermitian: reconstruction check failed");
  return out;
}

Superoperator vectorize_generator(const HermitianOperator& unitary_part,
                                  const std::vector<Superoperator>& dissipators) {
  const int d = unitary_part.dim();
  Mat g = hamiltonian_liouvillian(unitary_part.matrix());
  for (const auto& dis : dissipators) {
    if (dis.dim() != d)
      throw std::invalid_argument("vectorize_generator: dimension mismatch");
    g += dis.matrix();
  }
  return Superoperator(std::move(g), d);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        double floor, double support_tol) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> er(hermitize(rho.matrix()));
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(sigma.matrix()));

  // mass of rho outside the (floored) support of sigma
  double outside = 0.0;
  Mat log_sigma = Mat::Zero(sigma.dim(), sigma.dim());
  for (int i = 0; i < sigma.dim(); ++i) {
    const double s = es.eigenvalues()(i);
    const Vec v = es.eigenvectors().col(i);
    if (s < floor) {
      outside += std::real((v.adjoint() * rho.matrix() * v)(0, 0));
      log_sigma += std::log(floor) * (v * v.adjoint());
    } else {
      log_sigma += std::log(s) * (v * v.adjoint());
    }
  }
  if (outside > support_tol) return std::numeric_limits<double>::infinity();

  double s_rho = 0.0;  // tr rho log rho, skipping sub-floor eigenvalues (x log x -> 0)
  for (int i = 0; i < rho.dim(); ++i) {
    const double r = er.eigenvalues()(i);
    if (r >= floor) s_rho += r * std::log(r);
  }
  const double cross = std::real((rho.matrix() * log_sigma).trace());
  return s_rho - cross;
}

Mat gibbs_state(const Mat& h, double temperature) {
  if (temperature <= 0.0) throw std::invalid_argument("gibbs_state: T must be positive");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h));
  const RVec& e = es.eigenvalues();
  RVec p = (-(e.array() - e.minCoeff()) / temperature).exp();
  p /= p.sum();
  return es.eigenvectors() * p.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double expectation(const Mat& observable, const Mat& rho) {
  return std::real((observable * rho).trace());
}

double trace_distance(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a - b), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().array().abs().sum();
}

}  // namespace qheat::ops
