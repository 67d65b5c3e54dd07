#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "grail/agents.hpp"
#include "grail/core.hpp"
#include "grail/environment.hpp"

namespace grail {

struct ScheduleEntry {
  int start_epoch = 0;
  ParentMap parents;
  std::string note;  // free text carried through the config, not used
};

struct ExperimentConfig {
  std::string name = "experiment";
  AgentKind agent = AgentKind::kHGRAIL;
  int n = 1;
  std::vector<std::string> labels;  // optional, one per goal
  int epochs = 1;
  int reps = 1;
  std::uint64_t master_seed = 0;
  int eval_interval = 10;
  WorldConfig world;
  std::vector<ScheduleEntry> schedule;
  AgentParams params;

  // Throws ValidationError naming the field (graph errors are wrapped with
  // field "schedule[i].parents").
  void validate() const;
  GraphSchedule graph_schedule() const;
  std::string label(GoalId g) const;
};

// Built-in configurations "exp1" and "exp2". Throws ValidationError for any
// other name.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// JSON with // and /* */ comments. Unknown keys are rejected. Throws
// ParseError (with line and column) or ValidationError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string dump_config(const ExperimentConfig& cfg);

struct MetricsRow {
  int rep = 0;
  int epoch = 0;
  int goal_id = -1;  // -1 is the overall row
  double competence = 0.0;
  std::optional<double> eval_performance;
  int selections = 0;
  std::string agent;
};

using MetricsTable = std::vector<MetricsRow>;

// Seeds: the agent of rep r is seeded with derive_seed(master_seed, r); the
// evaluation before epoch e uses derive_seed(that, kEvalStream + e).
inline constexpr std::uint64_t kEvalStream = std::uint64_t{1} << 32;
std::uint64_t rep_seed(std::uint64_t master_seed, int rep);
std::uint64_t eval_seed(std::uint64_t rep_seed, int epoch);

// Per-epoch hook for instrumentation. Called from the thread that runs the
// rep.
using EpochHook = std::function<void(int rep, const Agent&, const EpochLog&)>;

// Runs one repetition. Every eval_interval epochs the agent is evaluated
// against the schedule's current graph before that epoch's training.
MetricsTable run_rep(const ExperimentConfig& cfg, int rep,
                     const EpochHook& hook = {});
// All reps on up to `jobs` threads; rows sorted by (rep, epoch, goal_id).
MetricsTable run_experiment(const ExperimentConfig& cfg, int jobs = 1,
                            const EpochHook& hook = {});

void sort_rows(MetricsTable& table);

inline constexpr const char* kCsvHeader =
    "rep,epoch,goal_id,competence,eval_performance,selections,agent";
std::string format_csv(const MetricsTable& table);
void write_csv(const MetricsTable& table, const std::string& path);
MetricsTable parse_csv(const std::string& text);
MetricsTable read_csv(const std::string& path);

// Mean and population standard deviation of the overall eval_performance
// across reps, per agent and eval epoch.
struct CurvePoint {
  int epoch = 0;
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};
struct Curve {
  std::string agent;
  std::vector<CurvePoint> points;
};
std::vector<Curve> aggregate_curves(const MetricsTable& table);

// Throws EmptyTable when the table has no eval rows.
std::string render_svg(const MetricsTable& table,
                       const std::vector<int>& switch_epochs = {});
void plot(const MetricsTable& table, const std::string& path,
          const std::vector<int>& switch_epochs = {});

}  // namespace grail
