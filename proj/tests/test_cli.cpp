#include "qheat/config.hpp"

#include "qheat/runners.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace qheat;

namespace {

const char* kSpinConfig = R"(
[run]
model = spin_boson

[system]
epsilon0 = 1.0

[bath.1]
lambda = 3e-3
cutoff = 100.0
temperature = 1.0

[bath.2]
lambda = 1e-3
cutoff = 100.0
temperature = 1.2

[heom]
n_matsubara = 4
depth = 3
)";

}  // namespace

TEST_CASE("config parsing round trip") {
  const auto cfg = config::parse_string(kSpinConfig);
  CHECK(cfg.model == "spin_boson");
  CHECK(cfg.bath1.lambda == doctest::Approx(3e-3));
  CHECK(cfg.bath2.temperature == doctest::Approx(1.2));
  CHECK(cfg.heom.n_matsubara == 4);
  CHECK(cfg.heom.depth == 3);
  CHECK(cfg.reference_list().size() == 2);
  CHECK(cfg.flavor_list().size() == 1);
}

TEST_CASE("config errors carry line numbers") {
  try {
    config::parse_string("[run]\nmodel = spin_boson\nbogus_key = 1\n", "inline");
    FAIL("expected a ConfigError");
  } catch (const config::ConfigError& e) {
    CHECK(std::string(e.what()).find("inline:3") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }

  CHECK_THROWS_AS(config::parse_string("[nope]\nx = 1\n"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_string("x = 1\n"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_string("[system]\nfock_dim = banana\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(config::parse_string("[bath.1]\ntemperature = -2\n"),
                  config::ConfigError);
}

TEST_CASE("deterministic CSV output") {
  auto cfg = config::parse_string(kSpinConfig);
  cfg.t1_points = 2;
  cfg.t2_points = 2;
  cfg.t1_min = 0.8;
  cfg.t1_max = 1.0;
  cfg.t2_min = 0.8;
  cfg.t2_max = 1.0;
  // keep the oracle cheap
  cfg.heom.n_matsubara = 3;
  cfg.heom.depth = 3;

  const auto rows1 = runners::run_current_sweep(cfg);
  const auto rows2 = runners::run_current_sweep(cfg);
  const std::string p1 = "/tmp/qheat_sweep_a.csv", p2 = "/tmp/qheat_sweep_b.csv";
  runners::write_currents_csv(p1, rows1);
  runners::write_currents_csv(p2, rows2);
  std::ifstream f1(p1), f2(p2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK(!s1.str().empty());
  std::remove(p1.c_str());
  std::remove(p2.c_str());

  // diagonal excluded: no row with t1 == t2
  for (const auto& r : rows1) CHECK(r.t1 != r.t2);
  // every row is tagged
  for (const auto& r : rows1) {
    CHECK(!r.method.empty());
    CHECK(!r.reference.empty());
  }
}

TEST_CASE("regression machinery: drift detection on a crafted golden file") {
  using nlohmann::json;
  // one exact-oscillator entry computed live, then perturbed
  exact_osc::OscillatorSpec spec;
  spec.omega0 = 1.0;
  spec.baths = {bath::BathSpec{{0.01, 100.0}, 1.0}, bath::BathSpec{{0.005, 100.0}, 1.5}};
  const double truth = exact_osc::exact_current(spec, 0);

  json golden;
  golden["schema"] = "qheat-golden-v1";
  json entry;
  entry["name"] = "osc_current_check";
  entry["kind"] = "exact_osc_current";
  entry["params"] = {{"omega0", 1.0}, {"lambda1", 0.01}, {"lambda2", 0.005},
                     {"cutoff", 100.0}, {"t1", 1.0}, {"t2", 1.5}, {"bath", 0}};
  entry["value"] = truth;
  entry["rel_tol"] = 1e-7;
  golden["entries"] = json::array({entry});

  const std::string good_path = "/tmp/qheat_golden_good.json";
  {
    std::ofstream out(good_path);
    out << golden.dump();
  }
  auto ok = runners::run_regression(good_path);
  CHECK(ok.checked == 1);
  CHECK(ok.failed == 0);

  // negative control: perturb the stored value beyond tolerance
  golden["entries"][0]["value"] = truth * (1.0 + 1e-4);
  const std::string bad_path = "/tmp/qheat_golden_bad.json";
  {
    std::ofstream out(bad_path);
    out << golden.dump();
  }
  auto bad = runners::run_regression(bad_path);
  CHECK(bad.failed == 1);
  CHECK(bad.report_json.find("osc_current_check") != std::string::npos);

  // incompatible schema is rejected outright
  golden["schema"] = "other";
  {
    std::ofstream out(bad_path);
    out << golden.dump();
  }
  CHECK_THROWS(runners::run_regression(bad_path));
  std::remove(good_path.c_str());
  std::remove(bad_path.c_str());
}

TEST_CASE("analytic thermal-oscillator current matches the dense pipeline") {
  config::RunConfig c;
  c.model = "oscillator";
  c.omega0 = 1.0;
  c.fock_dim = 30;
  c.bath1 = {0.01, 100.0, 1.0};
  c.bath2 = {0.005, 100.0, 1.5};
  const auto model = runners::build_model(c, 1.0, 1.5);
  for (auto ref : {master_eq::Reference::reorganised, master_eq::Reference::conventional}) {
    const auto rep = thermo::steady_currents(model, ref, master_eq::Flavor::secular_gkls);
    const double closed = runners::analytic_osc_gkls_current(c, 1.0, 1.5, ref);
    CHECK(rep.per_bath[0] == doctest::Approx(closed).epsilon(1e-3));
  }
}
