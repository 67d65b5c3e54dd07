// grail: run goal-selection experiments, plot their learning curves and
// validate configuration files.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "grail/errors.hpp"
#include "grail/experiment.hpp"

namespace fs = std::filesystem;
using namespace grail;

namespace {

struct RunOptions {
  std::string config;
  std::string preset;
  std::vector<std::string> agents;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<int> epochs;
  std::string out = ".";
  int jobs = 0;
};

std::vector<AgentKind> resolve_agents(const std::vector<std::string>& names,
                                      AgentKind fallback) {
  if (names.empty()) return {fallback};
  std::vector<AgentKind> kinds;
  for (const auto& name : names) {
    if (name == "all") {
      return {AgentKind::kBanditMDB, AgentKind::kMGRAIL, AgentKind::kHGRAIL};
    }
    const AgentKind k = parse_agent_kind(name);
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
  }
  return kinds;
}

int cmd_run(const RunOptions& opt) {
  ExperimentConfig base =
      opt.preset.empty() ? load_config(opt.config) : preset(opt.preset);
  if (opt.seed) base.master_seed = *opt.seed;
  if (opt.reps) base.reps = *opt.reps;
  if (opt.epochs) base.epochs = *opt.epochs;
  base.validate();

  int jobs = opt.jobs;
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  fs::create_directories(opt.out);
  MetricsTable combined;
  for (AgentKind kind : resolve_agents(opt.agents, base.agent)) {
    ExperimentConfig cfg = base;
    cfg.agent = kind;
    // The skill variant follows the agent kind when overriding the agent.
    if (!opt.agents.empty()) cfg.params.skill_variant.reset();
    cfg.validate();
    std::cerr << "running " << cfg.name << " " << to_string(kind) << ": "
              << cfg.reps << " reps x " << cfg.epochs << " epochs, jobs="
              << jobs << "\n";
    MetricsTable table = run_experiment(cfg, jobs);
    const fs::path csv = fs::path(opt.out) / (cfg.name + "_" + to_string(kind) + ".csv");
    write_csv(table, csv.string());
    std::cout << csv.string() << "\n";

    const auto curves = aggregate_curves(table);
    if (!curves.empty() && !curves.front().points.empty()) {
      const CurvePoint& last = curves.front().points.back();
      std::cerr << "  final eval (epoch " << last.epoch << "): mean "
                << last.mean << ", std " << last.std << "\n";
    }
    combined.insert(combined.end(), table.begin(), table.end());
  }
  const fs::path svg = fs::path(opt.out) / (base.name + ".svg");
  plot(combined, svg.string(), base.graph_schedule().switch_epochs());
  std::cout << svg.string() << "\n";
  return 0;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& out,
             const std::vector<int>& switches) {
  MetricsTable table;
  for (const auto& path : inputs) {
    MetricsTable t = read_csv(path);
    table.insert(table.end(), t.begin(), t.end());
  }
  plot(table, out, switches);
  std::cout << out << "\n";
  return 0;
}

int cmd_validate(const std::string& path) {
  const ExperimentConfig cfg = load_config(path);
  std::cout << "ok: " << cfg.name << " (" << to_string(cfg.agent) << ", n="
            << cfg.n << ", " << cfg.epochs << " epochs, " << cfg.reps
            << " reps, " << cfg.schedule.size() << " schedule segment"
            << (cfg.schedule.size() == 1 ? "" : "s") << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-selection experiments in the button world"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment and write CSV + SVG");
  auto* cfg_opt = run_cmd->add_option("--config", run.config, "JSON config file")
                      ->check(CLI::ExistingFile);
  auto* preset_opt = run_cmd->add_option("--preset", run.preset, "Built-in config")
                         ->check(CLI::IsMember(preset_names()));
  cfg_opt->excludes(preset_opt);
  run_cmd->add_option("--agent", run.agents,
                      "BanditMDB, MGRAIL, HGRAIL or all (repeatable)");
  run_cmd->add_option("--seed", run.seed, "Master seed");
  run_cmd->add_option("--reps", run.reps, "Number of repetitions");
  run_cmd->add_option("--epochs", run.epochs, "Number of training epochs");
  run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--jobs", run.jobs, "Concurrent repetitions (0 = all cores)")
      ->capture_default_str();

  std::vector<std::string> plot_in;
  std::string plot_out;
  std::vector<int> plot_switches;
  auto* plot_cmd = app.add_subcommand("plot", "Plot learning curves from CSV files");
  plot_cmd->add_option("--in", plot_in, "Metrics CSV files")
      ->required()
      ->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot_out, "Output SVG")->required();
  plot_cmd->add_option("--switch-epoch", plot_switches,
                       "Draw a marker at this epoch (repeatable)");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a config file");
  validate_cmd->add_option("--config", validate_path, "JSON config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      if (run.config.empty() && run.preset.empty()) {
        std::cerr << "error: run needs --config or --preset\n";
        return 2;
      }
      return cmd_run(run);
    }
    if (*plot_cmd) return cmd_plot(plot_in, plot_out, plot_switches);
    if (*validate_cmd) return cmd_validate(validate_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
