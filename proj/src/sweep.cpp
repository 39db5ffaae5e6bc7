#include "hmc_search/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <variant>

#include <fmt/format.h>

#include "hmc_search/config.hpp"
#include "hmc_search/evalharness.hpp"
#include "hmc_search/parallel.hpp"

namespace hmc_search {

ConfidenceInterval confidence_interval(std::span<const double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("confidence_interval needs at least one sample");
  }
  const auto n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() == 1) {
    return {mean, 0.0};
  }
  double ss = 0.0;
  for (double s : samples) {
    ss += (s - mean) * (s - mean);
  }
  const double stddev = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * stddev / std::sqrt(n)};
}

const std::vector<std::string>& tunable_parameters() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const std::string& key : config_keys()) {
      Hyperparams hp;
      if (!std::holds_alternative<bool*>(*field_ref(hp, key))) {
        out.push_back(key);
      }
    }
    return out;
  }();
  return names;
}

void set_parameter(Hyperparams& hp, const std::string& name, double value) {
  const auto ref = field_ref(hp, name);
  if (!ref || std::holds_alternative<bool*>(*ref)) {
    throw std::invalid_argument(fmt::format("unknown sweep parameter '{}'", name));
  }
  if (auto* i = std::get_if<int*>(&*ref)) {
    if (std::floor(value) != value) {
      throw std::invalid_argument(fmt::format("parameter '{}' needs an integer value, got {}", name, value));
    }
    **i = static_cast<int>(value);
  } else {
    *std::get<double*>(*ref) = value;
  }
}

double get_parameter(const Hyperparams& hp, const std::string& name) {
  Hyperparams copy = hp;
  const auto ref = field_ref(copy, name);
  if (!ref || std::holds_alternative<bool*>(*ref)) {
    throw std::invalid_argument(fmt::format("unknown sweep parameter '{}'", name));
  }
  if (auto* i = std::get_if<int*>(&*ref)) {
    return **i;
  }
  return *std::get<double*>(*ref);
}

const SweepPoint* SweepResult::find(double value) const {
  for (const SweepPoint& p : points) {
    if (p.value == value) {
      return &p;
    }
  }
  return nullptr;
}

std::size_t select_winner(const std::vector<SweepPoint>& points, SelectOn select_on) {
  if (points.empty()) {
    throw std::invalid_argument("no sweep points to select from");
  }
  auto better = [select_on](const SweepPoint& a, const SweepPoint& b) {
    const double ka = select_on == SelectOn::mean_steps ? a.steps.mean : -a.mean_win_rate;
    const double kb = select_on == SelectOn::mean_steps ? b.steps.mean : -b.mean_win_rate;
    if (ka != kb) {
      return ka < kb;
    }
    return a.value < b.value;  // cheaper setting on ties
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (better(points[i], points[best])) {
      best = i;
    }
  }
  return best;
}

SweepResult run_sweep(const SweepSpec& spec, int jobs, SelectOn select_on) {
  if (spec.values.empty()) {
    throw std::invalid_argument(fmt::format("sweep over '{}' has no values", spec.parameter));
  }
  if (spec.runs_per_value < 1) {
    throw std::invalid_argument("runs_per_value must be >= 1");
  }
  std::vector<Hyperparams> configs;
  for (double v : spec.values) {
    Hyperparams hp = spec.base;
    set_parameter(hp, spec.parameter, v);
    hp.validate();
    configs.push_back(hp);
  }

  struct RunResult {
    double mean = 0.0;
    double win_rate = 0.0;
  };
  const auto runs = static_cast<std::size_t>(spec.runs_per_value);
  const std::vector<RunResult> results = parallel_map(configs.size() * runs, jobs, [&](std::size_t job) {
    const Hyperparams& hp = configs[job / runs];
    const std::uint64_t seed = spec.base_seed + job % runs;
    const TrainReport trained = train_agent(hp, seed);
    Rng rng(eval_seed(seed));
    const DuelReport duels = run_duels(trained.q, hp, spec.eval_episodes, rng);
    return RunResult{duels.agent.mean, duels.vs_snake.win_rate()};
  });

  SweepResult out;
  out.parameter = spec.parameter;
  for (std::size_t v = 0; v < configs.size(); ++v) {
    SweepPoint point;
    point.value = spec.values[v];
    for (std::size_t r = 0; r < runs; ++r) {
      point.run_means.push_back(results[v * runs + r].mean);
      point.run_win_rates.push_back(results[v * runs + r].win_rate);
    }
    point.steps = confidence_interval(point.run_means);
    point.mean_win_rate = confidence_interval(point.run_win_rates).mean;
    out.points.push_back(std::move(point));
  }
  out.best = select_winner(out.points, select_on);
  return out;
}

TuningReport tuning_loop(const TuningPlan& plan, int jobs) {
  if (plan.passes < 1) {
    throw std::invalid_argument("tuning plan needs passes >= 1");
  }
  TuningReport report;
  report.final_hp = plan.base;
  for (int pass = 0; pass < plan.passes; ++pass) {
    for (const SweepStage& stage : plan.stages) {
      SweepSpec spec{stage.parameter, stage.values, plan.runs_per_value, report.final_hp, plan.base_seed,
                     plan.eval_episodes};
      SweepResult result = run_sweep(spec, jobs, plan.select_on);
      set_parameter(report.final_hp, stage.parameter, result.winner().value);
      report.sweeps.push_back(std::move(result));
      report.pass_of.push_back(pass);
    }
  }
  return report;
}

TuningPlan plan_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("sweep plan must be a JSON object");
  }
  static const std::vector<std::string> known = {"base",   "sweeps", "runs_per_value", "eval_episodes",
                                                 "passes", "seed",   "select_on"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument(fmt::format("unknown sweep plan key '{}'", key));
    }
  }

  TuningPlan plan;
  if (j.contains("base")) {
    plan.base = hyperparams_from_json(j.at("base"));
  }
  plan.runs_per_value = j.value("runs_per_value", plan.runs_per_value);
  plan.eval_episodes = j.value("eval_episodes", plan.eval_episodes);
  plan.passes = j.value("passes", plan.passes);
  plan.base_seed = j.value("seed", plan.base_seed);
  const std::string select = j.value("select_on", std::string("mean_steps"));
  if (select == "mean_steps") {
    plan.select_on = SelectOn::mean_steps;
  } else if (select == "win_rate") {
    plan.select_on = SelectOn::win_rate;
  } else {
    throw std::invalid_argument(fmt::format("select_on must be mean_steps or win_rate, got '{}'", select));
  }

  if (!j.contains("sweeps") || !j.at("sweeps").is_array() || j.at("sweeps").empty()) {
    throw std::invalid_argument("sweep plan needs a non-empty 'sweeps' array");
  }
  for (const auto& s : j.at("sweeps")) {
    SweepStage stage{s.at("parameter").get<std::string>(), s.at("values").get<std::vector<double>>()};
    if (stage.values.empty()) {
      throw std::invalid_argument(fmt::format("sweep over '{}' has no values", stage.parameter));
    }
    Hyperparams probe = plan.base;
    set_parameter(probe, stage.parameter, stage.values.front());  // rejects unknown names early
    plan.stages.push_back(std::move(stage));
  }
  return plan;
}

}  // namespace hmc_search
