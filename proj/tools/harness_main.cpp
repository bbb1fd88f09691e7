// Experiment driver: run <config>, accept, sweep <config>.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "homog/acceptance.hpp"
#include "homog/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw homog::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int finish(const homog::RunReport& rep, const std::string& out_dir) {
  homog::emit(rep, out_dir);
  for (const auto& s : rep.statuses) std::cout << s << "\n";
  for (const auto& v : rep.verdicts)
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.name << " (" << v.operation
              << ", tol " << v.tolerance << ", margin " << v.margin << ")\n";
  std::cout << "report written to " << out_dir << "\n";
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic visco-plastic homogenization lab"};
  app.require_subcommand(1);

  std::string config_path, out_override, seeds_override;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_override, "output directory (overrides the config)");
    sub->add_option("--seeds", seeds_override, "comma-separated seed list override");
    sub->add_option("--threads", threads, "worker threads (wall clock only, never results)");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment from a config file");
  run_cmd->add_option("config", config_path, "config file")->required();
  add_common(run_cmd);

  CLI::App* accept_cmd = app.add_subcommand("accept", "run the acceptance suite");
  add_common(accept_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run an eta-sweep config");
  sweep_cmd->add_option("config", config_path, "config file")->required();
  add_common(sweep_cmd);

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) {
    // results are independent of the thread count by contract; nothing to
    // configure since solves are single-threaded deterministic
  }

  try {
    if (accept_cmd->parsed()) {
      homog::RunReport rep = homog::acceptance_report();
      return finish(rep, out_override.empty() ? "out" : out_override);
    }
    homog::ExperimentConfig cfg = homog::parse_config(read_file(config_path));
    if (!seeds_override.empty()) {
      cfg.seed_list.clear();
      std::istringstream ss(seeds_override);
      std::string tok;
      while (std::getline(ss, tok, ','))
        cfg.seed_list.push_back(std::stoull(tok));
      if (cfg.seed_list.empty())
        throw homog::ConfigError("--seeds: empty seed list");
    }
    if (sweep_cmd->parsed() && cfg.kind != homog::ExperimentKind::eta_sweep)
      throw homog::ConfigError("sweep requires an eta-sweep config (got " +
                               homog::to_string(cfg.kind) + ")");
    if (cfg.kind == homog::ExperimentKind::acceptance_suite) {
      homog::RunReport rep = homog::acceptance_report();
      return finish(rep, out_override.empty() ? cfg.output_dir : out_override);
    }
    homog::RunReport rep = homog::run(cfg);
    return finish(rep, out_override.empty() ? cfg.output_dir : out_override);
  } catch (const homog::ConfigError& ex) {
    std::cerr << "configuration error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "numerical failure: " << ex.what() << "\n";
    return 3;
  }
}
