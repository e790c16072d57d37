// Command-line runner for connectivity experiments.
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "algcon/errors.hpp"
#include "algcon/experiment.hpp"
#include "algcon/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config;
  std::string seed;
  std::string seeds;
  std::string out;
  std::size_t jobs = 1;
  bool print_config = false;
  bool timing = false;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)");
  cmd->add_option("--seed", f.seed, "Run a single seed");
  cmd->add_option("--seeds", f.seeds, "Inclusive seed range N..M");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--jobs", f.jobs, "Seeds run concurrently")->check(CLI::PositiveNumber);
  cmd->add_option("--set", f.overrides, "Override a config key, e.g. --set schedule.gamma=0.6");
  cmd->add_flag("--print-config", f.print_config, "Print the resolved config and exit");
  cmd->add_flag("--timing", f.timing, "Add a wallclock_ns column to estimator traces");
}

nlohmann::json build_document(const CommonFlags& f, const std::string& scenario) {
  nlohmann::json doc = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw algcon::ConfigError("--config", "cannot open " + f.config);
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
      throw algcon::ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
  }
  if (!scenario.empty()) doc["scenario"] = scenario;
  for (const auto& o : f.overrides) algcon::apply_override(doc, o);
  if (!f.seed.empty() && !f.seeds.empty()) throw algcon::ConfigError("--seed", "use either --seed or --seeds");
  if (!f.seed.empty()) doc["seeds"] = f.seed;
  if (!f.seeds.empty()) doc["seeds"] = f.seeds;
  if (!f.out.empty()) doc["out"] = f.out;
  if (f.timing) doc["run"]["timing"] = true;
  return doc;
}

int run(const std::string& name, const CommonFlags& f) {
  const bool oracle = name == "oracle";
  algcon::ExperimentConfig cfg;
  try {
    cfg = algcon::parse_config(build_document(f, oracle ? "" : name));
  } catch (const algcon::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (f.print_config) {
    std::cout << algcon::config_to_json(cfg).dump(2) << '\n';
    return 0;
  }

  algcon::RunControls controls;
  controls.jobs = f.jobs;
  try {
    if (oracle) {
      const auto report = algcon::compare_oracle(cfg, controls);
      std::size_t failed = 0;
      for (const auto& r : report["runs"]) failed += r["ok"].get<bool>() ? 0 : 1;
      std::cout << "oracle report: " << report["runs"].size() << " runs, " << failed << " failed -> "
                << cfg.out_dir << "/oracle.json\n";
      return failed ? kExitRuntime : 0;
    }
    const auto result = algcon::run_scenario(cfg, controls);
    std::cout << algcon::to_string(cfg.scenario) << ": " << result.runs.size() << " runs, " << result.failures
              << " failed -> " << cfg.out_dir << "/summary.json\n";
    for (const auto& r : result.runs) {
      if (!r.ok) std::cerr << "seed " << r.seed << ": " << r.error << '\n';
    }
    return result.failures ? kExitRuntime : 0;
  } catch (const algcon::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connectivity estimation and control experiments"};
  app.set_version_flag("--version", algcon::version_string());
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"estimate", "Centralized stochastic power iteration"},
      {"track", "Estimator over scripted topology switches"},
      {"distributed", "Consensus-based distributed estimator"},
      {"control", "Transmit power control toward a target connectivity"},
      {"mac-sweep", "Expected connectivity versus power under channel collisions"},
      {"kw", "Kiefer-Wolfowitz search for the best transmit power"},
      {"oracle", "Compare a run against the dense eigensolver"},
  };
  std::vector<CommonFlags> flags(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    subs.push_back(app.add_subcommand(commands[i].first, commands[i].second));
    add_common(subs.back(), flags[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return run(commands[i].first, flags[i]);
  }
  return kExitConfig;
}
