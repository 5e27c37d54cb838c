#include "qheat/kernels.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace qheat;
using kernels::cplx;

namespace {

std::vector<cplx> random_vec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(d(rng), d(rng));
  return v;
}

void expect_close(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= 1e-13 * (1.0 + std::abs(a[i])));
  }
}

}  // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
  // sizes straddling the vector width, including odd remainders
  for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 8u, 33u, 1024u, 1027u}) {
    const auto x1 = random_vec(n, 1 + static_cast<unsigned>(n));
    const auto x2 = random_vec(n, 101 + static_cast<unsigned>(n));
    const cplx a1(0.3, -1.2), a2(-0.7, 0.25);

    auto ya = random_vec(n, 7);
    auto yb = ya;
    kernels::zaxpy(n, a1, x1.data(), ya.data());
    kernels::ref::zaxpy(n, a1, x1.data(), yb.data());
    expect_close(ya, yb);

    ya = random_vec(n, 8);
    yb = ya;
    kernels::zaxpy2(n, a1, x1.data(), a2, x2.data(), ya.data());
    kernels::ref::zaxpy2(n, a1, x1.data(), a2, x2.data(), yb.data());
    expect_close(ya, yb);

    std::vector<cplx> za(n), zb(n);
    kernels::zxpay(n, x1.data(), a2, x2.data(), za.data());
    kernels::ref::zxpay(n, x1.data(), a2, x2.data(), zb.data());
    expect_close(za, zb);

    ya = random_vec(n, 9);
    yb = ya;
    kernels::dscal(n, 0.37, ya.data());
    kernels::ref::dscal(n, 0.37, yb.data());
    expect_close(ya, yb);

    const double s1 = kernels::nrm2sq(n, x1.data());
    const double s2 = kernels::ref::nrm2sq(n, x1.data());
    CHECK(std::abs(s1 - s2) <= 1e-12 * (1.0 + s2));

    const auto e = random_vec(n, 10);
    const double w1 = kernels::wrms_norm(n, e.data(), x1.data(), x2.data(), 1e-10, 1e-7);
    const double w2 =
        kernels::ref::wrms_norm(n, e.data(), x1.data(), x2.data(), 1e-10, 1e-7);
    CHECK(std::abs(w1 - w2) <= 1e-10 * (1.0 + w2));
  }
}

TEST_CASE("forcing the scalar path changes the active ISA") {
  const bool prev = kernels::force_scalar(true);
  CHECK(std::string(kernels::active_isa()) == "scalar");
  kernels::force_scalar(prev);
}

TEST_CASE("avx2 variant is exercised directly when available") {
  if (!kernels::avx2::available()) return;
  const std::size_t n = 37;
  const auto x = random_vec(n, 3);
  auto ya = random_vec(n, 4);
  auto yb = ya;
  kernels::avx2::zaxpy(n, cplx(1.5, -0.5), x.data(), ya.data());
  kernels::ref::zaxpy(n, cplx(1.5, -0.5), x.data(), yb.data());
  expect_close(ya, yb);
}
