#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "hmc_search/env.hpp"
#include "hmc_search/policy.hpp"
#include "hmc_search/rng.hpp"

namespace hmc_search {

/// Training and environment settings. Defaults are the best-agent configuration.
struct Hyperparams {
  GridConfig grid;
  int num_episodes = 1000;
  double learning_rate = 0.1;
  double discount_rate = 0.0;
  double epsilon_start = 1.0;
  double epsilon_final = 0.0;
  double epsilon_decay = 0.001;
  bool normalize_epsilon_decay = true;
  int best_learn_value = 1;
  int num_clouds = 1;
  double mof_value = 10.0;
  double stop_learn_value = 1.0;
  int option_length = 3;
  double reward_scaling = 30.0;
  bool binary_memory = false;
  bool sense_each_step = true;  // false: clouds are only sensed where an option ends

  void validate() const;
};

struct Transition {
  Cell state;
  Direction option = Direction::up;
};

struct Trajectory {
  std::vector<Transition> transitions;
  std::vector<Cell> route;  // every primitive cell entered, in order
  Cell terminal;
  int n_step = 0;
  int n_poll = 0;
  double reward = 0.0;
  bool cleared = false;  // every cloud found
};

struct EpisodeRecord {
  int episode = 0;
  double epsilon = 0.0;
  int n_step = 0;
  int n_poll = 0;
  double reward = 0.0;
};

struct TrainReport {
  std::vector<EpisodeRecord> episodes;
  QTable q;
  std::uint64_t seed = 0;
  Hyperparams hyperparams;
};

enum class EpisodeMode { train, eval };

/// S_r * n_poll / n_step. Throws on n_step < 1.
[[nodiscard]] double trajectory_reward(double s_r, int n_step, int n_poll);

/// Linear decay clipped at epsilon_final.
[[nodiscard]] double epsilon_at(int episode, const Hyperparams& hp);

/// Plays one episode on `field`. Train mode is epsilon-soft with multi-cloud
/// termination; eval mode is greedy with the output filter and stops at the first find.
[[nodiscard]] Trajectory run_episode(const QTable& q, const Hyperparams& hp, EpisodeMode mode, double epsilon,
                                     CloudField field, Rng& rng);

/// Same, with clouds spawned from `rng` (num_clouds in train mode, one in eval mode).
[[nodiscard]] Trajectory run_episode(const QTable& q, const Hyperparams& hp, EpisodeMode mode, double epsilon,
                                     Rng& rng);

/// Applies the trajectory's single reward to every (state, option) occurrence, in order.
void learn_trajectory(QTable& q, const Trajectory& traj, const Hyperparams& hp);

[[nodiscard]] TrainReport train_agent(const Hyperparams& hp, std::uint64_t seed);

// Plain tabular Q-learning demonstrations.

struct DemoParams {
  int episodes = 2000;
  double gamma = 0.9;
  double found_bonus = 100.0;
  std::vector<int> snapshot_episodes;  // taken after that many episodes
  int eval_episodes = 1000;
};

struct QSnapshot {
  int episode = 0;
  Eigen::ArrayXXd max_q;  // (y, x)
};

struct DemoResult {
  std::vector<QSnapshot> snapshots;
  QTable q;
  std::optional<Cloud> static_cloud;
  std::vector<int> eval_steps;
  double mean_eval_steps = 0.0;
};

[[nodiscard]] DemoParams static_demo_defaults();
[[nodiscard]] DemoParams dynamic_demo_defaults();

/// One cloud fixed for all episodes.
[[nodiscard]] DemoResult static_demo(const Hyperparams& hp, std::uint64_t seed, const DemoParams& params);
/// Cloud respawned every episode, followed by a greedy evaluation without memory.
[[nodiscard]] DemoResult dynamic_demo(const Hyperparams& hp, std::uint64_t seed, const DemoParams& params);

/// Greedy, unfiltered primitive-action episode; returns steps or max_steps on failure.
[[nodiscard]] int greedy_primitive_steps(const QTable& q, const GridConfig& grid, CloudField field);

}  // namespace hmc_search
