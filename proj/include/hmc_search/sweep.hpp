#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmc_search/training.hpp"

namespace hmc_search {

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * sample stddev / sqrt(n); 0 for n = 1
};

/// Normal-approximation 95% interval. Throws on an empty sample.
[[nodiscard]] ConfidenceInterval confidence_interval(std::span<const double> samples);

/// Names accepted by set_parameter / get_parameter (the config keys).
[[nodiscard]] const std::vector<std::string>& tunable_parameters();

/// Overrides one Hyperparams field by config key. Integer fields reject fractional values.
void set_parameter(Hyperparams& hp, const std::string& name, double value);
[[nodiscard]] double get_parameter(const Hyperparams& hp, const std::string& name);

enum class SelectOn { mean_steps, win_rate };

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
  int runs_per_value = 20;
  Hyperparams base;
  std::uint64_t base_seed = 1;
  int eval_episodes = 1000;
};

struct SweepPoint {
  double value = 0.0;
  std::vector<double> run_means;      // mean steps per run
  std::vector<double> run_win_rates;  // duel win rate vs Snake per run
  ConfidenceInterval steps;
  double mean_win_rate = 0.0;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepPoint> points;
  std::size_t best = 0;  // index into points

  [[nodiscard]] const SweepPoint& winner() const { return points.at(best); }
  [[nodiscard]] const SweepPoint* find(double value) const;
};

/// Index of the winning point: lowest mean steps (or highest win rate); ties go to the smaller value.
[[nodiscard]] std::size_t select_winner(const std::vector<SweepPoint>& points, SelectOn select_on);

/// Trains and evaluates runs_per_value agents per candidate. Run r uses seed base_seed + r
/// for every candidate value.
[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec, int jobs = 1, SelectOn select_on = SelectOn::mean_steps);

struct SweepStage {
  std::string parameter;
  std::vector<double> values;
};

struct TuningPlan {
  Hyperparams base;
  std::vector<SweepStage> stages;
  int runs_per_value = 20;
  int eval_episodes = 1000;
  int passes = 1;
  std::uint64_t base_seed = 1;
  SelectOn select_on = SelectOn::mean_steps;
};

struct TuningReport {
  Hyperparams final_hp;
  std::vector<SweepResult> sweeps;  // pass-major order
  std::vector<int> pass_of;         // pass index per sweep
};

/// Runs the stages in order, fixing each winner before the next stage, `passes` times.
[[nodiscard]] TuningReport tuning_loop(const TuningPlan& plan, int jobs = 1);

/// Plan file: {"base": {config...}, "sweeps": [{"parameter": ..., "values": [...]}],
/// "runs_per_value", "eval_episodes", "passes", "seed", "select_on"}.
[[nodiscard]] TuningPlan plan_from_json(const nlohmann::json& j);

}  // namespace hmc_search
