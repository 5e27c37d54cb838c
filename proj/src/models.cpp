#include "qheat/models.hpp"

#include <cmath>
#include <stdexcept>

namespace qheat::models {

namespace {

void check_commuting_couplings(const SystemModel& m) {
  for (std::size_t i = 0; i < m.couplings.size(); ++i)
    for (std::size_t j = i + 1; j < m.couplings.size(); ++j) {
      const Mat c = ops::commutator(m.couplings[i].op, m.couplings[j].op);
      const double scale =
          std::max(1e-300, m.couplings[i].op.norm() * m.couplings[j].op.norm());
      if (c.norm() > 1e-12 * scale)
        throw std::invalid_argument("SystemModel: coupling operators must commute");
    }
}

OscillatorOps oscillator_ops_impl(double omega0, int fock_dim) {
  Mat a = Mat::Zero(fock_dim, fock_dim);
  for (int n = 1; n < fock_dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  OscillatorOps o;
  const double s = 1.0 / std::sqrt(2.0 * omega0);
  o.x = s * (a + Mat(a.adjoint()));
  o.p = cplx(0.0, 1.0) * std::sqrt(omega0 / 2.0) * (Mat(a.adjoint()) - a);
  o.x2 = o.x * o.x;
  return o;
}

}  // namespace

Mat SystemModel::counter_term() const {
  Mat ct = Mat::Zero(h0.rows(), h0.cols());
  for (const auto& c : couplings)
    ct += bath::reorganisation_energy(c.bath.sd) * (c.op * c.op);
  return ct;
}

Mat SystemModel::h_phys() const {
  return counter_term_included ? Mat(h0 + counter_term()) : h0;
}

Mat SystemModel::h_reorganised() const {
  return counter_term_included ? h0 : Mat(h0 - counter_term());
}

OscillatorOps oscillator_ops(double omega0, int fock_dim) {
  if (omega0 <= 0.0) throw std::invalid_argument("oscillator: omega0 must be > 0");
  if (fock_dim < 10) throw std::invalid_argument("oscillator: fock_dim must be >= 10");
  return oscillator_ops_impl(omega0, fock_dim);
}

SystemModel oscillator_model(double omega0, int fock_dim,
                             const std::array<bath::BathSpec, 2>& baths,
                             bool counter_term) {
  const OscillatorOps o = oscillator_ops(omega0, fock_dim);
  SystemModel m;
  m.name = "oscillator";
  // exact ladder spectrum; building H0 from x,p would corrupt the top levels
  m.h0 = Mat::Zero(fock_dim, fock_dim);
  for (int n = 0; n < fock_dim; ++n) m.h0(n, n) = omega0 * (n + 0.5);
  m.counter_term_included = counter_term;
  for (const auto& b : baths) {
    bath::validate(b);
    m.couplings.push_back({o.x, b});
  }
  double wr2 = omega0 * omega0;
  for (const auto& b : baths) wr2 += b.sd.lambda * b.sd.cutoff;
  if (wr2 <= 0.0)
    throw std::invalid_argument("oscillator: renormalised frequency not positive");
  check_commuting_couplings(m);
  return m;
}

SystemModel spin_boson_model(double epsilon0, const std::array<bath::BathSpec, 2>& baths,
                             bool counter_term, bool include_identity) {
  SystemModel m;
  m.name = "spin_boson";
  m.h0 = 0.5 * epsilon0 * pauli_z();
  m.counter_term_included = counter_term;
  Mat s = pauli_x();
  if (include_identity) s += Mat::Identity(2, 2);
  for (const auto& b : baths) {
    bath::validate(b);
    m.couplings.push_back({s, b});
  }
  check_commuting_couplings(m);
  return m;
}

Mat pauli_x() {
  Mat s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

Mat pauli_y() {
  Mat s(2, 2);
  s << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
  return s;
}

Mat pauli_z() {
  Mat s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

Mat plus_state() {
  Mat r(2, 2);
  r << 0.5, 0.5, 0.5, 0.5;
  return r;
}

}  // namespace qheat::models
