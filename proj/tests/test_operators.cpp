#include "qheat/operators.hpp"

#include "qheat/models.hpp"

#include <doctest.h>

#include <random>

using namespace qheat;
using ops::DensityMatrix;
using ops::HermitianOperator;
using ops::Superoperator;

namespace {

Mat random_hermitian(int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(n(rng), n(rng));
  return ops::hermitize(m);
}

Mat random_density(int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
  Mat rho = a * a.adjoint();
  rho /= rho.trace();
  return rho;
}

}  // namespace

TEST_CASE("eig_hermitian: spectra and round trip") {
  const Mat sz = models::pauli_z();
  auto eig = ops::eig_hermitian(Mat(0.5 * sz));
  CHECK(eig.values(0) == doctest::Approx(-0.5));
  CHECK(eig.values(1) == doctest::Approx(0.5));

  auto eid = ops::eig_hermitian(Mat(Mat::Identity(2, 2)));
  CHECK(eid.values(0) == doctest::Approx(1.0));
  CHECK(eid.values(1) == doctest::Approx(1.0));

  // 2x2 with closed-form eigenvalues: (e0/2) sz + c (1 + sx), e0 = 1, c = 0.1
  const double e0 = 1.0, c = 0.1;
  Mat h = 0.5 * e0 * sz + c * (Mat::Identity(2, 2) + models::pauli_x());
  auto e = ops::eig_hermitian(h);
  const double mean = c;                      // tr h / 2
  const double det = -0.25 * e0 * e0 - c * e0 * 0.0 - 0.0;  // recompute below
  (void)det;
  // characteristic polynomial roots of [[0.5+c, c], [c, -0.5+c]]
  const double disc = std::sqrt(0.25 * e0 * e0 + c * c);
  CHECK(e.values(0) == doctest::Approx(mean - disc).epsilon(1e-12));
  CHECK(e.values(1) == doctest::Approx(mean + disc).epsilon(1e-12));

  // unitarity of the eigenvector matrix
  const Mat h2 = random_hermitian(7, 42);
  auto e2 = ops::eig_hermitian(h2);
  CHECK((e2.vectors.adjoint() * e2.vectors - Mat::Identity(7, 7)).norm() < 1e-12);

  CHECK_THROWS_AS(ops::eig_hermitian(Mat(models::pauli_x() + cplx(0, 0.1) * Mat::Identity(2, 2))),
                  std::invalid_argument);
}

TEST_CASE("vectorize_generator reproduces direct evaluation") {
  // commuting input: -i[H, rho] = 0
  const Mat h = random_hermitian(3, 1);
  auto hv = HermitianOperator::from(h);
  auto gen = ops::vectorize_generator(hv, {});
  auto eig = ops::eig_hermitian(h);
  const Mat rho_comm =
      eig.vectors * Vec::Ones(3).asDiagonal() * eig.vectors.adjoint() / 3.0;
  CHECK(gen.apply(rho_comm).norm() < 1e-12);

  // random 3-level H + random GKLS dissipator vs direct evaluation on a basis
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  Mat a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  const double gamma = 0.37;
  Superoperator dis(ops::gkls_dissipator(a, gamma), 3);
  auto gen2 = ops::vectorize_generator(hv, {dis});
  const cplx im(0, 1);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      Mat basis = Mat::Zero(3, 3);
      basis(p, q) = 1.0;
      const Mat direct = -im * (h * basis - basis * h) +
                         gamma * (a * basis * a.adjoint() -
                                  0.5 * (a.adjoint() * a * basis + basis * a.adjoint() * a));
      CHECK((gen2.apply(basis) - direct).norm() < 1e-12 * std::max(1.0, direct.norm()));
    }

  // trace preservation of the GKLS part on random states
  for (unsigned s = 0; s < 5; ++s) {
    const Mat rho = random_density(3, 100 + s);
    CHECK(std::abs(gen2.apply(rho).trace()) < 1e-10);
  }

  CHECK_THROWS_AS(ops::vectorize_generator(hv, {Superoperator(Mat::Zero(4, 4), 2)}),
                  std::invalid_argument);
}

TEST_CASE("relative entropy") {
  const Mat rho = random_density(2, 9);
  auto r = DensityMatrix::from(rho);
  CHECK(ops::relative_entropy(r, r) == doctest::Approx(0.0).epsilon(1e-10));

  Mat pure = Mat::Zero(2, 2);
  pure(0, 0) = 1.0;
  Mat mixed = 0.5 * Mat::Identity(2, 2);
  CHECK(ops::relative_entropy(DensityMatrix::from(pure), DensityMatrix::from(mixed)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // spectral-decomposition oracle on random qubit states
  const Mat sigma = random_density(2, 10);
  auto s = DensityMatrix::from(sigma);
  Eigen::SelfAdjointEigenSolver<Mat> er(rho), es(sigma);
  Mat log_rho = er.eigenvectors() *
                er.eigenvalues().array().log().matrix().cast<cplx>().asDiagonal() *
                er.eigenvectors().adjoint();
  Mat log_sigma = es.eigenvectors() *
                  es.eigenvalues().array().log().matrix().cast<cplx>().asDiagonal() *
                  es.eigenvectors().adjoint();
  const double expected = std::real((rho * (log_rho - log_sigma)).trace());
  CHECK(ops::relative_entropy(r, s) == doctest::Approx(expected).epsilon(1e-10));

  // support violation signals infinite divergence
  Mat sup = Mat::Zero(2, 2);
  sup(1, 1) = 1.0;
  CHECK(std::isinf(ops::relative_entropy(DensityMatrix::from(pure),
                                         DensityMatrix::from(sup))));

  // non-negativity on random pairs
  for (unsigned k = 0; k < 20; ++k) {
    auto a = DensityMatrix::from(random_density(3, 200 + k));
    auto b = DensityMatrix::from(random_density(3, 300 + k));
    CHECK(ops::relative_entropy(a, b) >= -1e-10);
  }
}

TEST_CASE("density-matrix validation") {
  CHECK_THROWS(DensityMatrix::from(Mat(2.0 * Mat::Identity(2, 2))));
  Mat neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  CHECK_THROWS(DensityMatrix::from(neg));
  CHECK_NOTHROW(DensityMatrix::from(Mat(0.5 * Mat::Identity(2, 2))));
}

TEST_CASE("gibbs state and expectation helpers") {
  const Mat h = 0.5 * models::pauli_z();
  const Mat g = ops::gibbs_state(h, 1.0);
  const double z = std::exp(-0.5) + std::exp(0.5);
  CHECK(std::real(g(0, 0)) == doctest::Approx(std::exp(-0.5) / z).epsilon(1e-14));
  CHECK(std::real(g(1, 1)) == doctest::Approx(std::exp(0.5) / z).epsilon(1e-14));
  CHECK(ops::expectation(h, g) ==
        doctest::Approx(0.5 * (std::exp(-0.5) - std::exp(0.5)) / z).epsilon(1e-14));
}
