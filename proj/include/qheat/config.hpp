#pragma once

#include "qheat/heom.hpp"
#include "qheat/master_eq.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qheat::config {

// Flat INI-style configuration: [section] headers, key = value lines, '#'
// comments.  Unknown sections or keys are hard errors with the line number.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BathParams {
  double lambda = 0.0;
  double cutoff = 1.0;
  double temperature = 1.0;
};

struct RunConfig {
  // [run]
  std::string experiment;  // optional; must match the subcommand when set
  std::string model = "spin_boson";
  unsigned seed = 0;  // reserved; the physics uses no randomness

  // [system]
  double omega0 = 1.0;
  int fock_dim = 30;
  double epsilon0 = 1.0;
  bool counter_term = true;
  bool spin_identity_coupling = true;

  // [bath.1] / [bath.2]
  BathParams bath1, bath2;

  // [master_eq]
  std::string references = "both";  // conventional | reorganised | both
  std::string flavors = "gkls";     // gkls | redfield | both
  bool lamb_shift = true;
  std::string lamb_shift_sign = "minus";  // minus | plus
  bool absorb_lamb_shift = true;
  double degeneracy_tol = 0.0;

  // [dynamics]
  double t_max = 20.0;
  int n_times = 200;
  std::string initial_state = "default";  // plus | vacuum | gibbs | default
  bool dynamics_include_heom = true;
  bool dynamics_include_redfield = true;

  // [sweep]
  double t1_min = 0.5, t1_max = 2.0;
  int t1_points = 10;
  double t2_min = 0.5, t2_max = 2.0;
  int t2_points = 10;
  double t2_ratio = 0.0;  // > 0: line sweep with T2 = ratio * T1
  bool exclude_diagonal = true;
  bool sweep_include_redfield = false;

  // [heom]
  heom::HeomConfig heom;

  // [output]
  std::string out_dir = "out";

  master_eq::BuildOptions build_options() const;
  std::vector<master_eq::Reference> reference_list() const;
  std::vector<master_eq::Flavor> flavor_list() const;
};

RunConfig parse_file(const std::string& path);
RunConfig parse_string(const std::string& text, const std::string& origin = "<string>");

}  // namespace qheat::config
