#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace qheat {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

namespace ops {

// Column-stacking convention used throughout: vec(rho) stacks columns
// (Eigen's native layout), so vec(A rho B) = (B^T kron A) vec(rho).

Mat kron(const Mat& a, const Mat& b);
Mat spre(const Mat& x);                    // vec(x rho)
Mat spost(const Mat& x);                   // vec(rho x)
Mat sandwich(const Mat& a, const Mat& b);  // vec(a rho b)
Mat commutator(const Mat& a, const Mat& b);
Mat anticommutator(const Mat& a, const Mat& b);

// -i [h, .] as a dim^2 x dim^2 matrix
Mat hamiltonian_liouvillian(const Mat& h);

// gamma * (a rho a^dag - 1/2 {a^dag a, rho})
Mat gkls_dissipator(const Mat& a, double gamma);

Mat hermitize(const Mat& m);

class HermitianOperator {
 public:
  static HermitianOperator from(Mat m, double rel_tol = 1e-12);
  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  explicit HermitianOperator(Mat m) : m_(std::move(m)) {}
  Mat m_;
};

class DensityMatrix {
 public:
  static DensityMatrix from(Mat m, double herm_tol = 1e-10, double trace_tol = 1e-10,
                            double psd_tol = -1e-8);
  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  explicit DensityMatrix(Mat m) : m_(std::move(m)) {}
  Mat m_;
};

class Superoperator {
 public:
  Superoperator(Mat m, int dim);
  const Mat& matrix() const { return m_; }
  int dim() const { return dim_; }
  Mat apply(const Mat& rho) const;

 private:
  Mat m_;
  int dim_;
};

struct EigH {
  RVec values;  // ascending
  Mat vectors;  // unitary, columns are eigenvectors
};

EigH eig_hermitian(const HermitianOperator& h);
EigH eig_hermitian(const Mat& h, double rel_tol = 1e-12);

Superoperator vectorize_generator(const HermitianOperator& unitary_part,
                                  const std::vector<Superoperator>& dissipators);

// S(rho || sigma) = tr rho (log rho - log sigma); eigenvalues below
// `floor` are treated as outside the support.  Returns +inf when rho has
// more than `support_tol` mass outside sigma's support.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        double floor = 1e-12, double support_tol = 1e-10);

Mat gibbs_state(const Mat& h, double temperature);

double expectation(const Mat& observable, const Mat& rho);  // Re tr(O rho)
double trace_distance(const Mat& a, const Mat& b);

}  // namespace ops
}  // namespace qheat
