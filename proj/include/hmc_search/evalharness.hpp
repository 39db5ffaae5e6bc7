#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "hmc_search/baselines.hpp"
#include "hmc_search/policy.hpp"
#include "hmc_search/rng.hpp"
#include "hmc_search/training.hpp"

namespace hmc_search {

struct EvalStats {
  std::vector<int> steps;
  double mean = 0.0;
  int median = 0;  // lower median
  int failures = 0;
};

/// Summarises per-episode steps; entries equal to `max_steps` count as failures.
[[nodiscard]] EvalStats make_stats(std::vector<int> steps, int max_steps);

/// Greedy filtered episode against a single fixed cloud: steps to detection, max_steps on failure.
[[nodiscard]] int agent_steps(const QTable& q, const Hyperparams& hp, const Cloud& cloud);

/// n single-cloud greedy episodes with uniform random centres.
[[nodiscard]] EvalStats evaluate_agent(const QTable& q, const Hyperparams& hp, int n_episodes, Rng& rng);

enum class Outcome : std::int8_t { loss = -1, tie = 0, win = 1 };

[[nodiscard]] std::string_view to_string(Outcome o);

/// Fewer steps wins.
[[nodiscard]] constexpr Outcome duel(int agent_steps, int opponent_steps) {
  if (agent_steps < opponent_steps) return Outcome::win;
  if (agent_steps == opponent_steps) return Outcome::tie;
  return Outcome::loss;
}

struct DuelOutcome {
  int wins = 0;
  int ties = 0;
  int losses = 0;

  void add(Outcome o) {
    switch (o) {
      case Outcome::win: ++wins; break;
      case Outcome::tie: ++ties; break;
      case Outcome::loss: ++losses; break;
    }
  }
  [[nodiscard]] int total() const { return wins + ties + losses; }
  [[nodiscard]] double win_rate() const { return total() == 0 ? 0.0 : static_cast<double>(wins) / total(); }
};

[[nodiscard]] DuelOutcome tally(const std::vector<int>& agent, const std::vector<int>& opponent);

struct DuelRecord {
  Cell center;
  int agent = 0;
  int snake = 0;
  int spiral = 0;
};

struct DuelReport {
  std::vector<DuelRecord> rounds;
  DuelOutcome vs_snake;
  DuelOutcome vs_spiral;
  EvalStats agent;
};

/// n rounds; each round's random cloud is scored for the agent and both patterns.
/// Draws the same cloud sequence as evaluate_agent for an identically seeded rng.
[[nodiscard]] DuelReport run_duels(const QTable& q, const Hyperparams& hp, int n, Rng& rng);

/// Steps to detection for a cloud centred at every cell, laid out (y, x).
[[nodiscard]] Eigen::ArrayXXi agent_step_grid(const QTable& q, const Hyperparams& hp);
[[nodiscard]] Eigen::ArrayXXi pattern_step_grid(const PatternPath& path, const Hyperparams& hp);

struct ScoreMap {
  Eigen::ArrayXXi agent_steps;     // (y, x)
  Eigen::ArrayXXi opponent_steps;  // (y, x)
  Eigen::ArrayXXi outcome;         // (y, x), Outcome as -1/0/1

  [[nodiscard]] DuelOutcome totals() const;
};

[[nodiscard]] ScoreMap compare(const Eigen::ArrayXXi& agent_steps, const Eigen::ArrayXXi& opponent_steps);
[[nodiscard]] ScoreMap score_map(const QTable& q, const Hyperparams& hp, const PatternPath& opponent);

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<int> counts;

  void add(double value);
  [[nodiscard]] int total() const;
};

[[nodiscard]] Histogram make_histogram(double lo, double hi, int bins);

struct AgentSummary {
  std::uint64_t seed = 0;
  EvalStats eval;
  DuelOutcome vs_snake;
  [[nodiscard]] double win_percent() const { return 100.0 * vs_snake.win_rate(); }
};

struct PopulationReport {
  std::vector<AgentSummary> agents;
  Histogram mean_steps;
  Histogram win_percent;
};

/// Trains agents on seeds base_seed .. base_seed + n_agents - 1 and evaluates each.
[[nodiscard]] PopulationReport population_stats(const Hyperparams& hp, int n_agents, std::uint64_t base_seed,
                                                int eval_episodes = 1000, int jobs = 1);

/// Rng stream a trained agent is evaluated with.
[[nodiscard]] std::uint64_t eval_seed(std::uint64_t train_seed);

/// Visit counts over n greedy episodes; the start cell counts once per episode.
[[nodiscard]] Eigen::ArrayXXi route_heatmap(const QTable& q, const Hyperparams& hp, int n_episodes, Rng& rng);

}  // namespace hmc_search
