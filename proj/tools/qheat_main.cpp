// qheat: conventional vs reorganised master-equation heat currents with
// exact-oracle benchmarking (Eq.-(15)-style quadrature and HEOM).

#include "qheat/runners.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qheat;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string golden_path;
  int jobs = 0;
};

config::RunConfig load_config(const CommonArgs& args, const std::string& subcommand) {
  if (args.config_path.empty())
    throw config::ConfigError("--config is required for '" + subcommand + "'");
  auto cfg = config::parse_file(args.config_path);
  if (!cfg.experiment.empty() && cfg.experiment != subcommand)
    throw config::ConfigError("config sets experiment '" + cfg.experiment +
                              "' but subcommand is '" + subcommand + "'");
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  return cfg;
}

fs::path ensure_out_dir(const config::RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

json rows_to_json(const std::vector<runners::CurrentsRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"t1", r.t1},
                   {"t2", r.t2},
                   {"method", r.method},
                   {"reference", r.reference},
                   {"q1", r.q1},
                   {"q2", r.q2},
                   {"clausius_sum", r.clausius_sum},
                   {"balance_residual", r.balance_residual},
                   {"exact_q1", r.exact_q1},
                   {"rel_error", r.rel_error}});
  return arr;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heat currents from conventional and reorganised master equations"};
  app.require_subcommand(1);

  CommonArgs args;
  app.add_option("--config", args.config_path, "run configuration file");
  app.add_option("--out", args.out_dir, "output directory (overrides [output] dir)");
  app.add_option("--jobs", args.jobs, "worker threads (0 = library default)");
  app.add_option("--golden", args.golden_path, "golden-value file");

  auto* cmd_dynamics = app.add_subcommand("dynamics", "time series per method");
  auto* cmd_currents = app.add_subcommand("currents", "steady currents at one point");
  auto* cmd_sweep = app.add_subcommand("sweep", "currents over a temperature grid");
  auto* cmd_conv = app.add_subcommand("heom-convergence", "HEOM refinement report");
  auto* cmd_regress = app.add_subcommand("regression", "check frozen golden values");
  auto* cmd_golden = app.add_subcommand("write-golden", "recompute and write golden values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (args.jobs > 0) omp_set_num_threads(args.jobs);

  try {
    if (cmd_dynamics->parsed()) {
      auto cfg = load_config(args, "dynamics");
      const auto dir = ensure_out_dir(cfg);
      const auto table = runners::run_dynamics(cfg);
      runners::write_dynamics_csv((dir / "dynamics.csv").string(), table);
      std::cout << "wrote " << (dir / "dynamics.csv").string() << " ("
                << table.rows.size() << " rows)\n";
    } else if (cmd_currents->parsed()) {
      auto cfg = load_config(args, "currents");
      const auto dir = ensure_out_dir(cfg);
      const auto rows =
          runners::run_current_point(cfg, cfg.bath1.temperature, cfg.bath2.temperature);
      runners::write_currents_csv((dir / "currents.csv").string(), rows);
      write_text(dir / "currents.json", rows_to_json(rows).dump(2) + "\n");
      std::cout << "wrote " << (dir / "currents.csv").string() << "\n";
    } else if (cmd_sweep->parsed()) {
      auto cfg = load_config(args, "sweep");
      const auto dir = ensure_out_dir(cfg);
      const auto rows = runners::run_current_sweep(cfg);
      runners::write_currents_csv((dir / "sweep.csv").string(), rows);
      write_text(dir / "sweep.json", rows_to_json(rows).dump(2) + "\n");
      std::cout << "wrote " << (dir / "sweep.csv").string() << " (" << rows.size()
                << " rows)\n";
    } else if (cmd_conv->parsed()) {
      auto cfg = load_config(args, "heom-convergence");
      const auto dir = ensure_out_dir(cfg);
      const auto rep = runners::run_heom_convergence(cfg);
      json j;
      j["converged"] = rep.converged;
      j["max_rel_change"] = rep.max_rel_change;
      j["entries"] = json::array();
      std::ostringstream csv;
      csv << "which,n_matsubara,depth,value,rel_change\n";
      for (const auto& e : rep.entries) {
        j["entries"].push_back({{"which", e.which},
                                {"n_matsubara", e.n_matsubara},
                                {"depth", e.depth},
                                {"value", e.value},
                                {"rel_change", e.rel_change}});
        csv << e.which << ',' << e.n_matsubara << ',' << e.depth << ','
            << runners::format_g17(e.value) << ',' << runners::format_g17(e.rel_change)
            << '\n';
      }
      write_text(dir / "heom_convergence.csv", csv.str());
      write_text(dir / "heom_convergence.json", j.dump(2) + "\n");
      std::cout << (rep.converged ? "converged" : "NOT converged")
                << ", max relative change " << rep.max_rel_change << "\n";
    } else if (cmd_regress->parsed()) {
      if (args.golden_path.empty())
        throw config::ConfigError("--golden is required for 'regression'");
      const auto outcome = runners::run_regression(args.golden_path);
      fs::path dir(args.out_dir.empty() ? "." : args.out_dir);
      fs::create_directories(dir);
      write_text(dir / "regression_report.json", outcome.report_json + "\n");
      std::cout << "regression: " << (outcome.checked - outcome.failed) << "/"
                << outcome.checked << " entries passed\n";
      if (outcome.failed > 0) {
        std::cerr << "regression failures detected; see regression_report.json\n";
        return 3;
      }
    } else if (cmd_golden->parsed()) {
      if (args.golden_path.empty())
        throw config::ConfigError("--golden is required for 'write-golden'");
      runners::write_golden(args.golden_path);
      std::cout << "wrote " << args.golden_path << "\n";
    }
  } catch (const config::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
