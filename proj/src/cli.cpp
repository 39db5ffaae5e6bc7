#include "hmc_search/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <iostream>
#include <map>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>

#include "hmc_search/baselines.hpp"
#include "hmc_search/config.hpp"
#include "hmc_search/evalharness.hpp"
#include "hmc_search/io.hpp"
#include "hmc_search/sweep.hpp"

namespace hmc_search {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kDefaultEvalEpisodes = 1000;
constexpr int kDefaultPopulation = 20;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"train",      "eval",    "duel",        "scoremap",
                                                 "route",      "pattern", "sweep",       "population",
                                                 "demo-static", "demo-dynamic"};
  return names;
}

std::string utc_now() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
}

json stats_json(const EvalStats& s) {
  return {{"mean_steps", s.mean}, {"median_steps", s.median}, {"failures", s.failures},
          {"episodes", s.steps.size()}};
}

json duel_json(const DuelOutcome& d) {
  return {{"wins", d.wins}, {"ties", d.ties}, {"losses", d.losses}, {"win_rate", d.win_rate()}};
}

// Collects output file names as they are written.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  fs::path operator()(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

QTable obtain_agent(const RunOptions& opts) {
  if (opts.qtable) {
    return read_qtable_csv(*opts.qtable, opts.hp.grid.grid_length);
  }
  return train_agent(opts.hp, opts.seed).q;
}

json cmd_train(const RunOptions& opts, Outputs& out) {
  const TrainReport report = train_agent(opts.hp, opts.seed);
  write_qtable_csv(out("qtable.csv"), report.q);
  write_train_log_csv(out("train_log.csv"), report.episodes);
  int successes = 0;
  for (const EpisodeRecord& e : report.episodes) {
    successes += e.n_poll > 0 ? 1 : 0;
  }
  return {{"episodes", report.episodes.size()}, {"successful_episodes", successes}};
}

json cmd_eval(const RunOptions& opts, Outputs& out) {
  const QTable q = obtain_agent(opts);
  Rng rng(eval_seed(opts.seed));
  const EvalStats stats = evaluate_agent(q, opts.hp, opts.episodes.value_or(kDefaultEvalEpisodes), rng);
  write_steps_csv(out("steps.csv"), stats.steps);
  return stats_json(stats);
}

json cmd_duel(const RunOptions& opts, Outputs& out) {
  const QTable q = obtain_agent(opts);
  Rng rng(eval_seed(opts.seed));
  const DuelReport report = run_duels(q, opts.hp, opts.episodes.value_or(kDefaultEvalEpisodes), rng);
  write_duels_csv(out("duels.csv"), report);
  return {{"agent", stats_json(report.agent)},
          {"vs_snake", duel_json(report.vs_snake)},
          {"vs_spiral", duel_json(report.vs_spiral)}};
}

json cmd_scoremap(const RunOptions& opts, Outputs& out) {
  const QTable q = obtain_agent(opts);
  const Eigen::ArrayXXi agent = agent_step_grid(q, opts.hp);
  json metrics;
  for (PatternKind kind : {PatternKind::snake, PatternKind::spiral}) {
    const PatternPath path = make_pattern(kind, opts.hp.grid.grid_length, opts.hp.grid.pollution_diameter);
    const ScoreMap map = compare(agent, pattern_step_grid(path, opts.hp));
    write_scoremap_csv(out(fmt::format("scoremap_{}.csv", to_string(kind))), map);
    metrics[fmt::format("vs_{}", to_string(kind))] = duel_json(map.totals());
  }
  std::vector<int> steps(agent.data(), agent.data() + agent.size());
  metrics["agent"] = stats_json(make_stats(std::move(steps), opts.hp.grid.max_steps));
  return metrics;
}

json cmd_route(const RunOptions& opts, Outputs& out) {
  const QTable q = obtain_agent(opts);
  Rng rng(eval_seed(opts.seed));
  const int n = opts.episodes.value_or(kDefaultEvalEpisodes);
  const Eigen::ArrayXXi heat = route_heatmap(q, opts.hp, n, rng);
  write_grid_csv(out("route.csv"), heat, "count");
  return {{"episodes", n}, {"total_visits", heat.sum()}, {"max_visits", heat.maxCoeff()}};
}

json cmd_pattern(const RunOptions& opts, Outputs& out) {
  json metrics;
  for (PatternKind kind : {PatternKind::snake, PatternKind::spiral}) {
    const PatternPath path = make_pattern(kind, opts.hp.grid.grid_length, opts.hp.grid.pollution_diameter);
    const Eigen::ArrayXXi steps = pattern_step_grid(path, opts.hp);
    write_path_csv(out(fmt::format("{}.csv", to_string(kind))), path);
    write_grid_csv(out(fmt::format("{}_steps.csv", to_string(kind))), steps, "steps");
    json m = stats_json(make_stats(std::vector<int>(steps.data(), steps.data() + steps.size()), opts.hp.grid.max_steps));
    m["path_moves"] = path.moves();
    metrics[std::string(to_string(kind))] = m;
  }
  return metrics;
}

json cmd_sweep(const RunOptions& opts, Outputs& out) {
  if (!opts.plan) {
    throw std::invalid_argument("sweep needs a plan (--plan FILE)");
  }
  TuningPlan plan = plan_from_json(*opts.plan);
  if (!opts.plan->contains("base")) {
    plan.base = opts.hp;
  }
  if (opts.runs) plan.runs_per_value = *opts.runs;
  if (opts.episodes) plan.eval_episodes = *opts.episodes;
  const TuningReport report = tuning_loop(plan, opts.jobs);

  json sweeps = json::array();
  for (std::size_t i = 0; i < report.sweeps.size(); ++i) {
    const SweepResult& s = report.sweeps[i];
    const std::string name = fmt::format("sweep_{}_{}.csv", i, s.parameter);
    write_sweep_csv(out(name), s);
    sweeps.push_back({{"pass", report.pass_of[i]},
                      {"parameter", s.parameter},
                      {"winner", s.winner().value},
                      {"winner_mean_steps", s.winner().steps.mean},
                      {"winner_ci_half_width", s.winner().steps.half_width},
                      {"file", name}});
  }
  const json summary = {{"sweeps", sweeps}, {"final_hyperparams", to_json(report.final_hp)}};
  write_json_atomic(out("sweep_summary.json"), summary);
  return summary;
}

json cmd_population(const RunOptions& opts, Outputs& out) {
  const PopulationReport report = population_stats(opts.hp, opts.runs.value_or(kDefaultPopulation), opts.seed,
                                                   opts.episodes.value_or(kDefaultEvalEpisodes), opts.jobs);
  write_population_csv(out("population.csv"), report);
  write_histogram_csv(out("hist_mean_steps.csv"), report.mean_steps);
  write_histogram_csv(out("hist_win_percent.csv"), report.win_percent);

  std::vector<double> means;
  double best_win = 0.0;
  for (const AgentSummary& a : report.agents) {
    means.push_back(a.eval.mean);
    best_win = std::max(best_win, a.win_percent());
  }
  std::sort(means.begin(), means.end());
  return {{"agents", report.agents.size()},
          {"best_mean_steps", means.front()},
          {"median_mean_steps", means[(means.size() - 1) / 2]},
          {"best_win_percent", best_win}};
}

json cmd_demo(const RunOptions& opts, Outputs& out, bool dynamic) {
  DemoParams params = dynamic ? dynamic_demo_defaults() : static_demo_defaults();
  if (opts.gamma) params.gamma = *opts.gamma;
  if (opts.episodes) params.eval_episodes = *opts.episodes;
  const DemoResult result = dynamic ? dynamic_demo(opts.hp, opts.seed, params) : static_demo(opts.hp, opts.seed, params);

  for (const QSnapshot& snap : result.snapshots) {
    write_grid_csv(out(fmt::format("maxq_{}.csv", snap.episode)), snap.max_q, "value");
  }
  write_qtable_csv(out("qtable.csv"), result.q);
  json metrics = {{"episodes", params.episodes}, {"gamma", params.gamma}};
  if (result.static_cloud) {
    CloudField field;
    field.clouds.push_back(*result.static_cloud);
    metrics["cloud"] = to_json(field);
  }
  if (dynamic) {
    write_steps_csv(out("eval_steps.csv"), result.eval_steps);
    metrics["mean_eval_steps"] = result.mean_eval_steps;
  }
  return metrics;
}

json execute(const RunOptions& opts, Outputs& out) {
  const std::string& c = opts.command;
  if (c == "train") return cmd_train(opts, out);
  if (c == "eval") return cmd_eval(opts, out);
  if (c == "duel") return cmd_duel(opts, out);
  if (c == "scoremap") return cmd_scoremap(opts, out);
  if (c == "route") return cmd_route(opts, out);
  if (c == "pattern") return cmd_pattern(opts, out);
  if (c == "sweep") return cmd_sweep(opts, out);
  if (c == "population") return cmd_population(opts, out);
  if (c == "demo-static") return cmd_demo(opts, out, false);
  if (c == "demo-dynamic") return cmd_demo(opts, out, true);
  throw std::invalid_argument(fmt::format("unknown command '{}'", c));
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("HMC_SEARCH_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "out";
}

}  // namespace

json to_json(const RunOptions& opts) {
  json j = {{"command", opts.command}, {"hyperparams", to_json(opts.hp)}, {"seed", opts.seed}, {"jobs", opts.jobs}};
  j["runs"] = opts.runs ? json(*opts.runs) : json(nullptr);
  j["episodes"] = opts.episodes ? json(*opts.episodes) : json(nullptr);
  j["qtable"] = opts.qtable ? json(*opts.qtable) : json(nullptr);
  j["plan"] = opts.plan ? *opts.plan : json(nullptr);
  j["gamma"] = opts.gamma ? json(*opts.gamma) : json(nullptr);
  return j;
}

RunOptions run_options_from_json(const json& j) {
  RunOptions opts;
  try {
    opts.command = j.at("command").get<std::string>();
    opts.hp = hyperparams_from_json(j.at("hyperparams"));
    opts.seed = j.at("seed").get<std::uint64_t>();
    opts.jobs = j.value("jobs", 1);
    auto optional_field = [&j](const char* key, auto& field) {
      if (j.contains(key) && !j.at(key).is_null()) {
        field = j.at(key).get<typename std::remove_reference_t<decltype(field)>::value_type>();
      }
    };
    optional_field("runs", opts.runs);
    optional_field("episodes", opts.episodes);
    optional_field("qtable", opts.qtable);
    optional_field("gamma", opts.gamma);
    if (j.contains("plan") && !j.at("plan").is_null()) {
      opts.plan = j.at("plan");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("malformed manifest: {}", e.what()));
  }
  if (std::find(command_names().begin(), command_names().end(), opts.command) == command_names().end()) {
    throw std::invalid_argument(fmt::format("manifest names unknown command '{}'", opts.command));
  }
  return opts;
}

json run_command(const RunOptions& opts, const fs::path& out_dir) {
  opts.hp.validate();
  if (opts.jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
  if (opts.runs && *opts.runs < 1) throw std::invalid_argument("--runs must be >= 1");
  if (opts.episodes && *opts.episodes < 1) throw std::invalid_argument("--episodes must be >= 1");

  fs::create_directories(out_dir);
  json manifest = to_json(opts);
  manifest["started_at"] = utc_now();
  Outputs out(out_dir);
  manifest["metrics"] = execute(opts, out);
  manifest["outputs"] = out.names();
  manifest["finished_at"] = utc_now();
  write_json_atomic(out_dir / "manifest.json", manifest);
  return manifest;
}

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Pollution-cloud search: option-based RL agents versus coverage patterns", "hmc_search"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = default_out_dir().string();
  int runs = 0;
  int episodes = 0;
  int jobs = 1;
  auto* config_opt = app.add_option("--config", config_path, "JSON hyperparameter file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Base random seed");
  app.add_option("--out", out_dir, "Output directory (default: $HMC_SEARCH_OUT or ./out)");
  auto* runs_opt = app.add_option("--runs", runs, "Agents, or runs per sweep value");
  auto* episodes_opt = app.add_option("--episodes", episodes, "Evaluation episodes");
  app.add_option("--jobs", jobs, "Parallel independent runs")->check(CLI::PositiveNumber);

  std::string qtable_path;
  std::string plan_path;
  std::string select_on;
  double gamma = 0.0;
  std::string manifest_path;
  std::map<std::string, CLI::App*> subs;

  const std::map<std::string, std::string> help = {
      {"train", "Train one agent; writes qtable.csv and train_log.csv"},
      {"eval", "Greedy evaluation on random clouds"},
      {"duel", "Random-cloud duels against Snake and Spiral"},
      {"scoremap", "Duels over every cloud centre"},
      {"route", "Visit heatmap of greedy routes"},
      {"pattern", "Snake and Spiral paths with their step tables"},
      {"sweep", "Hyperparameter sweeps from a plan file"},
      {"population", "Train and evaluate a population of agents"},
      {"demo-static", "Plain Q-learning on one fixed cloud"},
      {"demo-dynamic", "Plain Q-learning with a new cloud every episode"}};
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    if (name == "eval" || name == "duel" || name == "scoremap" || name == "route") {
      sub->add_option("--qtable", qtable_path, "Load this Q-table CSV instead of training")
          ->check(CLI::ExistingFile);
    }
    if (name == "sweep") {
      sub->add_option("--plan", plan_path, "JSON sweep plan")->required()->check(CLI::ExistingFile);
      sub->add_option("--select-on", select_on, "Winner criterion")
          ->check(CLI::IsMember({"mean_steps", "win_rate"}));
    }
    if (name == "demo-static" || name == "demo-dynamic") {
      sub->add_option("--gamma", gamma, "Discount rate (default 0.9)")->check(CLI::Range(0.0, 1.0));
    }
    subs[name] = sub;
  }
  CLI::App* rerun = app.add_subcommand("rerun", "Repeat the run recorded in a manifest");
  rerun->add_option("manifest", manifest_path, "manifest.json of an earlier run")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    RunOptions opts;
    if (rerun->parsed()) {
      opts = run_options_from_json(read_json(manifest_path));
    } else {
      opts.hp = config_opt->count() > 0 ? parse_config(config_path) : Hyperparams{};
      opts.seed = seed;
      opts.jobs = jobs;
      if (runs_opt->count() > 0) opts.runs = runs;
      if (episodes_opt->count() > 0) opts.episodes = episodes;
      for (const auto& [name, sub] : subs) {
        if (sub->parsed()) opts.command = name;
      }
      if (!qtable_path.empty()) opts.qtable = fs::absolute(qtable_path).string();
      if (opts.command == "demo-static" || opts.command == "demo-dynamic") {
        if (subs[opts.command]->count("--gamma") > 0) opts.gamma = gamma;
      }
      if (opts.command == "sweep") {
        json plan = read_json(plan_path);
        if (!plan.is_object()) throw std::invalid_argument("sweep plan must be a JSON object");
        // The manifest carries the resolved plan so a rerun needs no other file.
        if (!plan.contains("base")) plan["base"] = to_json(opts.hp);
        if (seed_opt->count() > 0) plan["seed"] = seed;
        if (!select_on.empty()) plan["select_on"] = select_on;
        opts.plan = std::move(plan);
      }
    }
    const json manifest = run_command(opts, out_dir);
    fmt::print("{}: wrote {} files to {}\n", opts.command, manifest["outputs"].size() + 1, out_dir);
    fmt::print("{}\n", manifest["metrics"].dump());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("hmc_search");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace hmc_search
