#include "qheat/heom.hpp"

#include "qheat/exact_osc.hpp"
#include "qheat/master_eq.hpp"
#include "qheat/runners.hpp"
#include "qheat/thermo.hpp"

#include <Eigen/Sparse>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qheat;

namespace {

heom::Hierarchy spin_hierarchy(double l1, double l2, double cutoff, double t1, double t2,
                               const heom::HeomConfig& cfg) {
  const auto model = models::spin_boson_model(
      1.0, {bath::BathSpec{{l1, cutoff}, t1}, bath::BathSpec{{l2, cutoff}, t2}});
  std::vector<bath::ExponentialSeries> series;
  std::vector<Mat> couplings;
  for (const auto& c : model.couplings) {
    series.push_back(bath::correlation_series(c.bath, cfg.n_matsubara));
    couplings.push_back(c.op);
  }
  return heom::Hierarchy(model.h_phys(), couplings, series, cfg);
}

}  // namespace

TEST_CASE("lattice size and tier-ordered enumeration") {
  CHECK(heom::lattice_size(4, 2) == 15);
  CHECK(heom::lattice_size(0, 5) == 1);
  heom::HeomConfig cfg;
  cfg.n_matsubara = 1;  // 2 slots per bath, 4 total
  cfg.depth = 2;
  auto h = spin_hierarchy(1e-3, 1e-3, 50.0, 1.0, 1.0, cfg);
  CHECK(h.n_slots() == 4);
  CHECK(h.n_ado() == static_cast<int>(heom::lattice_size(4, 2)));
}

TEST_CASE("assembled generator matches the matrix-free application") {
  heom::HeomConfig cfg;
  cfg.n_matsubara = 2;
  cfg.depth = 3;
  auto h = spin_hierarchy(3e-3, 1e-3, 30.0, 0.9, 1.3, cfg);
  const std::size_t n = h.state_size();

  Eigen::SparseMatrix<cplx> a(n, n);
  {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (const auto& t : h.assemble()) trip.emplace_back(t.row, t.col, t.value);
    a.setFromTriplets(trip.begin(), trip.end());
  }

  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x(i) = cplx(nd(rng), nd(rng));
  Vec direct = a * x;
  Vec via_apply(n);
  h.apply(x.data(), via_apply.data());
  CHECK((direct - via_apply).norm() < 1e-12 * direct.norm());
}

TEST_CASE("decoupled hierarchy reduces to unitary dynamics") {
  heom::HeomConfig cfg;
  cfg.depth = 3;
  cfg.n_matsubara = 2;
  auto h = spin_hierarchy(0.0, 0.0, 50.0, 1.0, 2.0, cfg);
  CHECK(h.n_slots() == 0);
  CHECK(h.n_ado() == 1);
  auto dyn = heom::propagate(h, models::plus_state(), {0.0, 0.9});
  // H_S = sz/2 when Q = 0: Larmor rotation of the coherence
  CHECK(std::real(dyn.states[1](0, 1)) ==
        doctest::Approx(0.5 * std::cos(0.9)).epsilon(1e-8));
  CHECK(dyn.max_trace_drift < 1e-12);
}

TEST_CASE("depth-0 edge: unitary plus terminator damping, no current access") {
  heom::HeomConfig cfg;
  cfg.depth = 0;
  cfg.n_matsubara = 1;
  auto h = spin_hierarchy(3e-3, 1e-3, 50.0, 1.0, 1.5, cfg);
  CHECK(h.n_ado() == 1);

  // generator action on a random state equals -i[H, rho] - sum_b R_b [S,[S,rho]]
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  Mat rho(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) rho(i, j) = cplx(nd(rng), nd(rng));
  std::vector<cplx> in(rho.data(), rho.data() + 4), out(4);
  h.apply(in.data(), out.data());
  const Mat s = h.coupling(0);
  Mat expect = -cplx(0, 1) * ops::commutator(h.h_sys(), rho);
  for (int b = 0; b < 2; ++b) {
    const Mat dc = ops::commutator(s, ops::commutator(s, rho));
    expect -= h.markovian_tail(b) * dc;
  }
  const Mat got = Eigen::Map<const Mat>(out.data(), 2, 2);
  CHECK((got - expect).norm() < 1e-13 * expect.norm());

  std::vector<cplx> state(4, cplx(0.25, 0.0));
  CHECK_THROWS(h.current(state, 0));
}

TEST_CASE("propagation conserves trace and hermiticity") {
  heom::HeomConfig cfg;
  cfg.n_matsubara = 4;
  cfg.depth = 4;
  auto h = spin_hierarchy(3e-3, 1e-3, 100.0, 1.0, 1.2, cfg);
  auto dyn = heom::propagate(h, models::plus_state(), {0.0, 2.0, 8.0});
  CHECK(dyn.max_trace_drift < 1e-9);
  CHECK(dyn.max_herm_drift < 1e-9);
}

TEST_CASE("steady state: equilibrium current vanishes, baths balance") {
  heom::HeomConfig cfg;
  cfg.n_matsubara = 6;
  cfg.depth = 4;
  auto heq = spin_hierarchy(3e-3, 1e-3, 100.0, 1.4, 1.4, cfg);
  auto sseq = heom::steady_state(heq);
  CHECK(sseq.residual < 1e-9);
  CHECK(std::abs(heq.current(sseq.state, 0)) < 1e-10);
  CHECK(std::abs(heq.current(sseq.state, 1)) < 1e-10);

  auto h = spin_hierarchy(3e-3, 1e-3, 100.0, 1.0, 1.2, cfg);
  auto ss = heom::steady_state(h);
  CHECK(ss.residual < 1e-9);
  const double q1 = h.current(ss.state, 0);
  const double q2 = h.current(ss.state, 1);
  CHECK(std::abs(q1 + q2) < 1e-9);
  CHECK(q2 > 0.0);  // hot bath feeds the system
  CHECK(q1 < 0.0);

  // physical block is a density matrix
  CHECK(std::abs(ss.rho.trace() - cplx(1, 0)) < 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(ss.rho, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > -1e-8);
}

TEST_CASE("single weak bath: steady state approaches Gibbs of H_S") {
  heom::HeomConfig cfg;
  cfg.n_matsubara = 6;
  cfg.depth = 4;
  const double lam = 1e-4;
  auto h = spin_hierarchy(lam, 0.0, 100.0, 1.0, 1.0, cfg);
  auto ss = heom::steady_state(h);
  const Mat gibbs = ops::gibbs_state(h.h_sys(), 1.0);
  // deviation is second order in the system-bath coupling
  CHECK(ops::trace_distance(ss.rho, gibbs) < 5e-3);
}

TEST_CASE("weak-coupling cross-check against the reorganised GKLS current") {
  const double scale = 0.1;  // ten times weaker than the Fig.-3 couplings
  const auto model = models::spin_boson_model(
      1.0, {bath::BathSpec{{3e-4, 100.0}, 1.0}, bath::BathSpec{{1e-4, 100.0}, 1.2}});
  (void)scale;
  const auto gk = thermo::reorganised_current(model);

  heom::HeomConfig cfg;
  cfg.n_matsubara = 6;
  cfg.depth = 3;
  auto h = spin_hierarchy(3e-4, 1e-4, 100.0, 1.0, 1.2, cfg);
  auto ss = heom::steady_state(h);
  const double q_heom = h.current(ss.state, 0);
  CHECK(q_heom == doctest::Approx(gk.per_bath[0]).epsilon(0.05));
}

TEST_CASE("oscillator dual-oracle consistency at a softened cutoff") {
  // smaller cutoff and dimension keep this development-loop check cheap;
  // the pinned Fig.-1 point runs in the acceptance suite
  config::RunConfig c;
  c.model = "oscillator";
  c.omega0 = 1.0;
  c.fock_dim = 14;
  c.bath1 = {0.05, 10.0, 1.0};
  c.bath2 = {0.025, 10.0, 1.5};

  heom::HeomConfig cfg;
  cfg.n_matsubara = 4;
  cfg.depth = 3;
  const auto obs = runners::heom_steady_observables(c, 1.0, 1.5, cfg);
  CHECK(obs.balance < 1e-9);

  const double exact = exact_osc::exact_current(runners::osc_spec(c, 1.0, 1.5), 0);
  CHECK(obs.current_b1 == doctest::Approx(exact).epsilon(0.05));
}

TEST_CASE("convergence sweep") {
  heom::HeomConfig cfg;
  cfg.n_matsubara = 2;
  cfg.depth = 2;

  // decoupled system converges at any setting
  auto trivial = heom::convergence_sweep(
      [](const heom::HeomConfig&) { return 0.0; }, cfg);
  CHECK(trivial.converged);

  auto observable = [&](const heom::HeomConfig& hc) {
    auto h = spin_hierarchy(3e-3, 1e-3, 100.0, 1.0, 1.2, hc);
    auto ss = heom::steady_state(h);
    return h.current(ss.state, 0);
  };
  auto rep = heom::convergence_sweep(observable, cfg, 0.05);
  REQUIRE(rep.entries.size() == 3);
  CHECK(rep.entries[0].which == "base");
  CHECK(rep.entries[1].n_matsubara == 4);
  CHECK(rep.entries[2].depth == 4);
}

TEST_CASE("terminator on/off differ little at converged settings") {
  heom::HeomConfig with;
  with.n_matsubara = 10;
  with.depth = 4;
  heom::HeomConfig without = with;
  without.terminator = false;
  auto h1 = spin_hierarchy(3e-3, 1e-3, 100.0, 1.0, 1.2, with);
  auto h2 = spin_hierarchy(3e-3, 1e-3, 100.0, 1.0, 1.2, without);
  const double q1 = h1.current(heom::steady_state(h1).state, 0);
  const double q2 = h2.current(heom::steady_state(h2).state, 0);
  CHECK(q1 == doctest::Approx(q2).epsilon(0.02));
}

TEST_CASE("memory budget guard") {
  heom::HeomConfig cfg;
  cfg.n_matsubara = 12;
  cfg.depth = 12;
  cfg.memory_budget_mb = 1;
  CHECK_THROWS_WITH_AS(spin_hierarchy(3e-3, 1e-3, 100.0, 1.0, 1.2, cfg),
                       doctest::Contains("memory"), std::runtime_error);
}
