#include "grail/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "grail/errors.hpp"
#include "json.hpp"

namespace grail {

using nlohmann::json;

namespace {

ParentMap exp1_graph() { return {{2, {0, 1}}, {3, {2}}, {5, {4}}}; }

// Rewires the complex chain: red now needs green, and blue needs red and
// yellow instead of red and green.
ParentMap exp2_switch_graph() {
  return {{0, {1}}, {2, {0, 4}}, {3, {2}}, {5, {4}}};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (name.empty()) throw ValidationError("name", "must not be empty");
  if (n < 1 || n > kMaxGoals) {
    throw ValidationError("n", "must be in [1, " + std::to_string(kMaxGoals) +
                                   "]");
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != n) {
    throw ValidationError("labels", "expected " + std::to_string(n) +
                                        " labels, got " +
                                        std::to_string(labels.size()));
  }
  if (epochs < 1) throw ValidationError("epochs", "must be >= 1");
  if (reps < 1) throw ValidationError("reps", "must be >= 1");
  if (eval_interval < 1) throw ValidationError("eval_interval", "must be >= 1");
  world.validate(n);
  if (schedule.empty()) {
    throw ValidationError("schedule", "at least one segment is required");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const std::string field = "schedule[" + std::to_string(i) + "]";
    if (i == 0 && schedule[i].start_epoch != 0) {
      throw ValidationError(field + ".start_epoch", "first segment must start at 0");
    }
    if (i > 0 && schedule[i].start_epoch <= schedule[i - 1].start_epoch) {
      throw ValidationError(field + ".start_epoch", "must be strictly increasing");
    }
    try {
      validate_graph(schedule[i].parents, n);
    } catch (const ValidationError&) {
      throw;
    } catch (const Error& e) {
      throw ValidationError(field + ".parents", e.what());
    }
  }
  params.skills.validate();
  params.selector.validate();
  if (params.competence_window < 2) {
    throw ValidationError("competence.window", "must be >= 2");
  }
  const SkillVariant required = required_skill_variant(agent);
  if (params.skill_variant && *params.skill_variant != required) {
    throw ValidationError("skills.variant",
                          to_string(agent) + " requires " + to_string(required) +
                              " skills");
  }
}

GraphSchedule ExperimentConfig::graph_schedule() const {
  std::vector<GraphSchedule::Segment> segments;
  for (const auto& s : schedule) {
    segments.push_back({s.start_epoch, DependencyGraph(n, s.parents)});
  }
  return GraphSchedule(std::move(segments));
}

std::string ExperimentConfig::label(GoalId g) const {
  if (g >= 0 && g < static_cast<int>(labels.size())) return labels[g];
  return "g" + std::to_string(g);
}

std::vector<std::string> preset_names() { return {"exp1", "exp2"}; }

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.n = 6;
  cfg.labels = {"red", "green", "blue", "cyan", "yellow", "magenta"};
  cfg.reps = 20;
  cfg.master_seed = 1;
  cfg.eval_interval = 10;
  cfg.world.button_cells = {{1, 1}, {3, 1}, {5, 1}, {7, 1}, {1, 7}, {5, 7}};
  cfg.params.competence_window = 40;
  cfg.schedule = {{0, exp1_graph(), ""}};
  if (name == "exp1") {
    cfg.name = "exp1";
    cfg.epochs = 500;
  } else if (name == "exp2") {
    cfg.name = "exp2";
    cfg.epochs = 2000;
    cfg.schedule.push_back(
        {1000, exp2_switch_graph(),
         "illustrative switch, not taken from the paper's figure"});
  } else {
    throw ValidationError("preset", "unknown preset '" + name +
                                        "' (expected exp1 or exp2)");
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON config

namespace {

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw ValidationError(path.empty() ? "<root>" : path, "expected an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ValidationError(path.empty() ? key : path + "." + key,
                            "unknown key");
    }
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

int get_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ValidationError(field, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < INT32_MIN || x > INT32_MAX) throw ValidationError(field, "out of range");
  return static_cast<int>(x);
}

double get_double(const json& v, const std::string& field) {
  if (!v.is_number()) throw ValidationError(field, "expected a number");
  return v.get<double>();
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ValidationError(field, "expected a string");
  return v.get<std::string>();
}

Cell get_cell(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) {
    throw ValidationError(field, "expected [x, y]");
  }
  return {get_int(v[0], field + "[0]"), get_int(v[1], field + "[1]")};
}

void read_world(const json& j, WorldConfig& w) {
  const std::string p = "world";
  check_keys(j, p, {"grid_w", "grid_h", "button_cells", "home_cell",
                    "trial_timeout", "trials_per_epoch"});
  if (j.contains("grid_w")) w.grid_w = get_int(j["grid_w"], join(p, "grid_w"));
  if (j.contains("grid_h")) w.grid_h = get_int(j["grid_h"], join(p, "grid_h"));
  if (j.contains("home_cell")) {
    w.home_cell = get_cell(j["home_cell"], join(p, "home_cell"));
  }
  if (j.contains("trial_timeout")) {
    w.trial_timeout = get_int(j["trial_timeout"], join(p, "trial_timeout"));
  }
  if (j.contains("trials_per_epoch")) {
    w.trials_per_epoch =
        get_int(j["trials_per_epoch"], join(p, "trials_per_epoch"));
  }
  if (!j.contains("button_cells")) {
    throw ValidationError(join(p, "button_cells"), "is required");
  }
  const json& cells = j["button_cells"];
  if (!cells.is_array()) {
    throw ValidationError(join(p, "button_cells"), "expected an array");
  }
  w.button_cells.clear();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    w.button_cells.push_back(
        get_cell(cells[i], join(p, "button_cells") + "[" + std::to_string(i) + "]"));
  }
}

ParentMap read_parents(const json& j, const std::string& field) {
  if (!j.is_object()) throw ValidationError(field, "expected an object");
  ParentMap parents;
  for (const auto& [key, value] : j.items()) {
    const std::string f = field + "." + key;
    std::size_t used = 0;
    int child = 0;
    try {
      child = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != key.size()) {
      throw ValidationError(f, "goal keys must be integers");
    }
    if (!value.is_array()) throw ValidationError(f, "expected an array of goals");
    auto& set = parents[child];
    for (std::size_t i = 0; i < value.size(); ++i) {
      set.insert(get_int(value[i], f + "[" + std::to_string(i) + "]"));
    }
  }
  return parents;
}

void read_schedule(const json& j, std::vector<ScheduleEntry>& schedule) {
  if (!j.is_array()) throw ValidationError("schedule", "expected an array");
  schedule.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = "schedule[" + std::to_string(i) + "]";
    check_keys(j[i], p, {"start_epoch", "parents", "note"});
    ScheduleEntry entry;
    if (!j[i].contains("start_epoch")) {
      throw ValidationError(join(p, "start_epoch"), "is required");
    }
    entry.start_epoch = get_int(j[i]["start_epoch"], join(p, "start_epoch"));
    if (j[i].contains("parents")) {
      entry.parents = read_parents(j[i]["parents"], join(p, "parents"));
    }
    if (j[i].contains("note")) entry.note = get_string(j[i]["note"], join(p, "note"));
    schedule.push_back(std::move(entry));
  }
}

void read_skills(const json& j, AgentParams& params) {
  const std::string p = "skills";
  check_keys(j, p, {"backend", "variant", "p0", "tau", "alpha", "gamma",
                    "epsilon0", "epsilon_decay"});
  SkillParams& s = params.skills;
  try {
    if (j.contains("backend")) {
      s.backend = parse_skill_backend(get_string(j["backend"], join(p, "backend")));
    }
    if (j.contains("variant")) {
      params.skill_variant =
          parse_skill_variant(get_string(j["variant"], join(p, "variant")));
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(p, e.what());
  }
  if (j.contains("p0")) s.p0 = get_double(j["p0"], join(p, "p0"));
  if (j.contains("tau")) s.tau = get_double(j["tau"], join(p, "tau"));
  if (j.contains("alpha")) s.alpha = get_double(j["alpha"], join(p, "alpha"));
  if (j.contains("gamma")) s.gamma = get_double(j["gamma"], join(p, "gamma"));
  if (j.contains("epsilon0")) {
    s.epsilon0 = get_double(j["epsilon0"], join(p, "epsilon0"));
  }
  if (j.contains("epsilon_decay")) {
    s.epsilon_decay = get_double(j["epsilon_decay"], join(p, "epsilon_decay"));
  }
}

void read_selector(const json& j, SelectorParams& s) {
  const std::string p = "selector";
  check_keys(j, p, {"epsilon", "eta", "alpha", "gamma"});
  if (j.contains("epsilon")) s.epsilon = get_double(j["epsilon"], join(p, "epsilon"));
  if (j.contains("eta")) s.eta = get_double(j["eta"], join(p, "eta"));
  if (j.contains("alpha")) s.alpha = get_double(j["alpha"], join(p, "alpha"));
  if (j.contains("gamma")) s.gamma = get_double(j["gamma"], join(p, "gamma"));
}

// 1-based line and column of a byte offset.
std::pair<int, int> locate(const std::string& text, std::size_t offset) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, /*allow_exceptions=*/true,
                    /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    // byte is one past the offending character.
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    auto [line, column] = locate(text, offset);
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) {
      if (auto colon = what.find(": ", pos); colon != std::string::npos) {
        what = what.substr(colon + 2);
      }
    }
    throw ParseError(what, line, column);
  }

  check_keys(j, "", {"name", "agent", "n", "labels", "epochs", "reps",
                     "master_seed", "eval_interval", "world", "schedule",
                     "competence", "skills", "selector"});
  for (const char* required : {"n", "epochs", "world", "schedule"}) {
    if (!j.contains(required)) throw ValidationError(required, "is required");
  }

  ExperimentConfig cfg;
  if (j.contains("name")) cfg.name = get_string(j["name"], "name");
  if (j.contains("agent")) cfg.agent = parse_agent_kind(get_string(j["agent"], "agent"));
  cfg.n = get_int(j["n"], "n");
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) throw ValidationError("labels", "expected an array");
    for (std::size_t i = 0; i < j["labels"].size(); ++i) {
      cfg.labels.push_back(
          get_string(j["labels"][i], "labels[" + std::to_string(i) + "]"));
    }
  }
  cfg.epochs = get_int(j["epochs"], "epochs");
  if (j.contains("reps")) cfg.reps = get_int(j["reps"], "reps");
  if (j.contains("master_seed")) {
    const json& s = j["master_seed"];
    if (!s.is_number_unsigned()) {
      throw ValidationError("master_seed", "expected a non-negative integer");
    }
    cfg.master_seed = s.get<std::uint64_t>();
  }
  if (j.contains("eval_interval")) {
    cfg.eval_interval = get_int(j["eval_interval"], "eval_interval");
  }
  read_world(j["world"], cfg.world);
  read_schedule(j["schedule"], cfg.schedule);
  if (j.contains("competence")) {
    check_keys(j["competence"], "competence", {"window"});
    if (j["competence"].contains("window")) {
      cfg.params.competence_window =
          get_int(j["competence"]["window"], "competence.window");
    }
  }
  if (j.contains("skills")) read_skills(j["skills"], cfg.params);
  if (j.contains("selector")) read_selector(j["selector"], cfg.params.selector);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["agent"] = to_string(cfg.agent);
  j["n"] = cfg.n;
  if (!cfg.labels.empty()) j["labels"] = cfg.labels;
  j["epochs"] = cfg.epochs;
  j["reps"] = cfg.reps;
  j["master_seed"] = cfg.master_seed;
  j["eval_interval"] = cfg.eval_interval;
  json cells = json::array();
  for (const Cell& c : cfg.world.button_cells) cells.push_back({c.x, c.y});
  j["world"] = {{"grid_w", cfg.world.grid_w},
                {"grid_h", cfg.world.grid_h},
                {"button_cells", cells},
                {"home_cell", {cfg.world.home_cell.x, cfg.world.home_cell.y}},
                {"trial_timeout", cfg.world.trial_timeout},
                {"trials_per_epoch", cfg.world.trials_per_epoch}};
  json schedule = json::array();
  for (const auto& s : cfg.schedule) {
    json parents = json::object();
    for (const auto& [child, ps] : s.parents) {
      parents[std::to_string(child)] = std::vector<int>(ps.begin(), ps.end());
    }
    json entry = {{"start_epoch", s.start_epoch}, {"parents", parents}};
    if (!s.note.empty()) entry["note"] = s.note;
    schedule.push_back(entry);
  }
  j["schedule"] = schedule;
  j["competence"] = {{"window", cfg.params.competence_window}};
  const SkillParams& sk = cfg.params.skills;
  j["skills"] = {{"backend", to_string(sk.backend)},
                 {"p0", sk.p0},
                 {"tau", sk.tau},
                 {"alpha", sk.alpha},
                 {"gamma", sk.gamma},
                 {"epsilon0", sk.epsilon0},
                 {"epsilon_decay", sk.epsilon_decay}};
  if (cfg.params.skill_variant) {
    j["skills"]["variant"] = to_string(*cfg.params.skill_variant);
  }
  const SelectorParams& se = cfg.params.selector;
  j["selector"] = {{"epsilon", se.epsilon},
                   {"eta", se.eta},
                   {"alpha", se.alpha},
                   {"gamma", se.gamma}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Runner

std::uint64_t rep_seed(std::uint64_t master_seed, int rep) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(rep));
}

std::uint64_t eval_seed(std::uint64_t rep_seed, int epoch) {
  return derive_seed(rep_seed, kEvalStream + static_cast<std::uint64_t>(epoch));
}

MetricsTable run_rep(const ExperimentConfig& cfg, int rep,
                     const EpochHook& hook) {
  const GraphSchedule schedule = cfg.graph_schedule();
  ButtonWorld env(cfg.world, schedule);
  const std::uint64_t seed = rep_seed(cfg.master_seed, rep);
  Agent agent(cfg.agent, cfg.n, cfg.params, seed);
  const std::string kind = to_string(cfg.agent);

  MetricsTable rows;
  rows.reserve(static_cast<std::size_t>(cfg.epochs) * (cfg.n + 1));
  for (int e = 0; e < cfg.epochs; ++e) {
    std::optional<EvalResult> eval;
    if (e % cfg.eval_interval == 0) {
      eval = agent.evaluate(cfg.world, schedule.graph_at(e), eval_seed(seed, e));
    }
    const EpochLog log = agent.run_epoch(env, e);
    if (hook) hook(rep, agent, log);

    MetricsRow overall;
    overall.rep = rep;
    overall.epoch = e;
    overall.goal_id = -1;
    overall.competence = agent.tracker().overall_competence();
    if (eval) overall.eval_performance = eval->performance;
    overall.selections = static_cast<int>(log.trials.size());
    overall.agent = kind;
    rows.push_back(overall);
    for (GoalId g = 0; g < cfg.n; ++g) {
      MetricsRow row;
      row.rep = rep;
      row.epoch = e;
      row.goal_id = g;
      row.competence = log.competence[g];
      if (eval) row.eval_performance = eval->achieved[g] ? 1.0 : 0.0;
      row.selections = log.selections[g];
      row.agent = kind;
      rows.push_back(row);
    }
  }
  return rows;
}

MetricsTable run_experiment(const ExperimentConfig& cfg, int jobs,
                            const EpochHook& hook) {
  cfg.validate();
  const int workers = std::clamp(jobs, 1, cfg.reps);
  std::vector<MetricsTable> per_rep(static_cast<std::size_t>(cfg.reps));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.reps));
  std::atomic<int> next{0};

  auto work = [&] {
    for (int r = next++; r < cfg.reps; r = next++) {
      try {
        per_rep[r] = run_rep(cfg, r, hook);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  MetricsTable table;
  for (auto& rows : per_rep) {
    table.insert(table.end(), std::make_move_iterator(rows.begin()),
                 std::make_move_iterator(rows.end()));
  }
  sort_rows(table);
  return table;
}

void sort_rows(MetricsTable& table) {
  std::stable_sort(table.begin(), table.end(),
                   [](const MetricsRow& a, const MetricsRow& b) {
                     if (a.rep != b.rep) return a.rep < b.rep;
                     if (a.epoch != b.epoch) return a.epoch < b.epoch;
                     return a.goal_id < b.goal_id;
                   });
}

// ---------------------------------------------------------------------------
// CSV

namespace {

void append_fixed(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  out += buf;
}

}  // namespace

std::string format_csv(const MetricsTable& table) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const MetricsRow& r : table) {
    out += std::to_string(r.rep);
    out += ',';
    out += std::to_string(r.epoch);
    out += ',';
    out += std::to_string(r.goal_id);
    out += ',';
    append_fixed(out, r.competence);
    out += ',';
    if (r.eval_performance) append_fixed(out, *r.eval_performance);
    out += ',';
    out += std::to_string(r.selections);
    out += ',';
    out += r.agent;
    out += '\n';
  }
  return out;
}

void write_csv(const MetricsTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  const std::string text = format_csv(table);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write to '" + path + "' failed");
}

namespace {

int parse_int_field(const std::string& s, int line, int column) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) {
    throw ParseError("expected an integer, got '" + s + "'", line, column);
  }
  return v;
}

double parse_double_field(const std::string& s, int line, int column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) {
    throw ParseError("expected a number, got '" + s + "'", line, column);
  }
  return v;
}

}  // namespace

MetricsTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  MetricsTable table;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != kCsvHeader) {
        throw ParseError("unexpected CSV header '" + line + "'", 1, 1);
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::vector<int> columns;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      columns.push_back(static_cast<int>(start) + 1);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) {
      throw ParseError("expected 7 fields, got " + std::to_string(fields.size()),
                       lineno, 1);
    }
    MetricsRow r;
    r.rep = parse_int_field(fields[0], lineno, columns[0]);
    r.epoch = parse_int_field(fields[1], lineno, columns[1]);
    r.goal_id = parse_int_field(fields[2], lineno, columns[2]);
    r.competence = parse_double_field(fields[3], lineno, columns[3]);
    if (!fields[4].empty()) {
      r.eval_performance = parse_double_field(fields[4], lineno, columns[4]);
    }
    r.selections = parse_int_field(fields[5], lineno, columns[5]);
    r.agent = fields[6];
    if (r.agent.empty()) throw ParseError("empty agent field", lineno, columns[6]);
    table.push_back(std::move(r));
  }
  if (lineno == 0) throw ParseError("missing CSV header", 1, 1);
  return table;
}

MetricsTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_csv(text.str());
}

}  // namespace grail
