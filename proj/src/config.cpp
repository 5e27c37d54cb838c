#include "qheat/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace qheat::config {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

struct Setter {
  RunConfig* cfg;
  std::string origin;
  int line = 0;

  double num(const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &pos);
    } catch (const std::exception&) {
      fail(origin, line, "expected a number, got '" + v + "'");
    }
    if (pos != v.size()) fail(origin, line, "trailing characters in number '" + v + "'");
    return x;
  }

  int integer(const std::string& v) {
    const double x = num(v);
    const int i = static_cast<int>(x);
    if (x != i) fail(origin, line, "expected an integer, got '" + v + "'");
    return i;
  }

  bool boolean(const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(origin, line, "expected true/false, got '" + v + "'");
  }

  void apply(const std::string& section, const std::string& key, const std::string& v) {
    auto is = [&](const char* s, const char* k) { return section == s && key == k; };
    RunConfig& c = *cfg;
    if (is("run", "experiment")) c.experiment = v;
    else if (is("run", "model")) c.model = v;
    else if (is("run", "seed")) c.seed = static_cast<unsigned>(integer(v));
    else if (is("system", "omega0")) c.omega0 = num(v);
    else if (is("system", "fock_dim")) c.fock_dim = integer(v);
    else if (is("system", "epsilon0")) c.epsilon0 = num(v);
    else if (is("system", "counter_term")) c.counter_term = boolean(v);
    else if (is("system", "spin_identity_coupling")) c.spin_identity_coupling = boolean(v);
    else if (is("bath.1", "lambda")) c.bath1.lambda = num(v);
    else if (is("bath.1", "cutoff")) c.bath1.cutoff = num(v);
    else if (is("bath.1", "temperature")) c.bath1.temperature = num(v);
    else if (is("bath.2", "lambda")) c.bath2.lambda = num(v);
    else if (is("bath.2", "cutoff")) c.bath2.cutoff = num(v);
    else if (is("bath.2", "temperature")) c.bath2.temperature = num(v);
    else if (is("master_eq", "references")) c.references = v;
    else if (is("master_eq", "flavors")) c.flavors = v;
    else if (is("master_eq", "lamb_shift")) c.lamb_shift = boolean(v);
    else if (is("master_eq", "lamb_shift_sign")) c.lamb_shift_sign = v;
    else if (is("master_eq", "absorb_lamb_shift")) c.absorb_lamb_shift = boolean(v);
    else if (is("master_eq", "degeneracy_tol")) c.degeneracy_tol = num(v);
    else if (is("dynamics", "t_max")) c.t_max = num(v);
    else if (is("dynamics", "n_times")) c.n_times = integer(v);
    else if (is("dynamics", "initial_state")) c.initial_state = v;
    else if (is("dynamics", "include_heom")) c.dynamics_include_heom = boolean(v);
    else if (is("dynamics", "include_redfield")) c.dynamics_include_redfield = boolean(v);
    else if (is("sweep", "t1_min")) c.t1_min = num(v);
    else if (is("sweep", "t1_max")) c.t1_max = num(v);
    else if (is("sweep", "t1_points")) c.t1_points = integer(v);
    else if (is("sweep", "t2_min")) c.t2_min = num(v);
    else if (is("sweep", "t2_max")) c.t2_max = num(v);
    else if (is("sweep", "t2_points")) c.t2_points = integer(v);
    else if (is("sweep", "t2_ratio")) c.t2_ratio = num(v);
    else if (is("sweep", "exclude_diagonal")) c.exclude_diagonal = boolean(v);
    else if (is("sweep", "include_redfield")) c.sweep_include_redfield = boolean(v);
    else if (is("heom", "n_matsubara")) c.heom.n_matsubara = integer(v);
    else if (is("heom", "depth")) c.heom.depth = integer(v);
    else if (is("heom", "terminator")) c.heom.terminator = boolean(v);
    else if (is("heom", "rtol")) c.heom.rtol = num(v);
    else if (is("heom", "atol")) c.heom.atol = num(v);
    else if (is("output", "dir")) c.out_dir = v;
    else fail(origin, line, "unknown key '" + key + "' in section [" + section + "]");
  }
};

const std::set<std::string> kSections = {"run",      "system", "bath.1", "bath.2",
                                         "master_eq", "dynamics", "sweep", "heom",
                                         "output"};

void validate(const RunConfig& c, const std::string& origin) {
  auto fail0 = [&origin](const std::string& msg) { throw ConfigError(origin + ": " + msg); };
  if (c.model != "oscillator" && c.model != "spin_boson")
    fail0("model must be 'oscillator' or 'spin_boson'");
  if (c.omega0 <= 0.0) fail0("system.omega0 must be > 0");
  if (c.epsilon0 <= 0.0) fail0("system.epsilon0 must be > 0");
  if (c.fock_dim < 10) fail0("system.fock_dim must be >= 10");
  for (const auto* b : {&c.bath1, &c.bath2}) {
    if (b->lambda < 0.0) fail0("bath lambda must be >= 0");
    if (b->cutoff <= 0.0) fail0("bath cutoff must be > 0");
    if (b->temperature <= 0.0) fail0("bath temperature must be > 0");
  }
  if (c.references != "conventional" && c.references != "reorganised" &&
      c.references != "both")
    fail0("master_eq.references must be conventional|reorganised|both");
  if (c.flavors != "gkls" && c.flavors != "redfield" && c.flavors != "both")
    fail0("master_eq.flavors must be gkls|redfield|both");
  if (c.lamb_shift_sign != "minus" && c.lamb_shift_sign != "plus")
    fail0("master_eq.lamb_shift_sign must be minus|plus");
  if (c.t_max <= 0.0) fail0("dynamics.t_max must be > 0");
  if (c.n_times < 2) fail0("dynamics.n_times must be >= 2");
  if (c.t1_points < 1 || c.t2_points < 1) fail0("sweep point counts must be >= 1");
  if (c.t1_min <= 0.0 || c.t2_min <= 0.0) fail0("sweep temperatures must be > 0");
  if (c.heom.n_matsubara < 0) fail0("heom.n_matsubara must be >= 0");
  if (c.heom.depth < 0) fail0("heom.depth must be >= 0");
}

}  // namespace

master_eq::BuildOptions RunConfig::build_options() const {
  master_eq::BuildOptions opt;
  opt.include_lamb_shift = lamb_shift;
  opt.lamb_sign = lamb_shift_sign == "plus" ? master_eq::LambSign::plus
                                            : master_eq::LambSign::minus;
  opt.absorb_lamb_shift = absorb_lamb_shift;
  opt.degeneracy_tol = degeneracy_tol;
  return opt;
}

std::vector<master_eq::Reference> RunConfig::reference_list() const {
  using master_eq::Reference;
  if (references == "conventional") return {Reference::conventional};
  if (references == "reorganised") return {Reference::reorganised};
  return {Reference::reorganised, Reference::conventional};
}

std::vector<master_eq::Flavor> RunConfig::flavor_list() const {
  using master_eq::Flavor;
  if (flavors == "gkls") return {Flavor::secular_gkls};
  if (flavors == "redfield") return {Flavor::redfield};
  return {Flavor::secular_gkls, Flavor::redfield};
}

RunConfig parse_string(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  if (const char* env = std::getenv("QHEAT_HEOM_MEM_MB")) {
    char* end = nullptr;
    const long mb = std::strtol(env, &end, 10);
    if (end && *end == '\0' && mb > 0)
      cfg.heom.memory_budget_mb = static_cast<std::size_t>(mb);
  }

  Setter set{&cfg, origin, 0};
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    set.line = line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!kSections.count(section)) fail(origin, line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(origin, line, "expected key = value");
    if (section.empty()) fail(origin, line, "key outside any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) fail(origin, line, "empty key or value");
    set.apply(section, key, value);
  }
  validate(cfg, origin);
  return cfg;
}

RunConfig parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

}  // namespace qheat::config
