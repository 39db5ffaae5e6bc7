#include "hmc_search/training.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace hmc_search {

namespace {

void require(bool ok, const char* what) {
  if (!ok) {
    throw std::invalid_argument(what);
  }
}

// Rng stream ids under a training seed.
constexpr std::uint64_t kAttemptStream = 1;
constexpr std::uint64_t kDemoEvalStream = 2;

}  // namespace

void Hyperparams::validate() const {
  grid.validate();
  require(num_episodes >= 1, "num_episodes must be >= 1");
  require(learning_rate > 0.0 && learning_rate <= 1.0, "learning_rate must be in (0, 1]");
  require(discount_rate >= 0.0 && discount_rate <= 1.0, "discount_rate must be in [0, 1]");
  require(epsilon_start >= 0.0 && epsilon_start <= 1.0, "epsilon_start must be in [0, 1]");
  require(epsilon_final >= 0.0 && epsilon_final <= epsilon_start, "epsilon_final must be in [0, epsilon_start]");
  require(epsilon_decay >= 0.0, "epsilon_decay must be >= 0");
  require(best_learn_value >= 1, "best_learn_value must be >= 1");
  require(num_clouds >= 1, "num_clouds must be >= 1");
  require(mof_value >= 0.0 && std::isfinite(mof_value), "mof_value must be finite and >= 0");
  require(stop_learn_value > 0.0 && stop_learn_value <= 1.0, "stop_learn_value must be in (0, 1]");
  require(option_length >= 1, "option_length must be >= 1");
  require(std::isfinite(reward_scaling), "reward_scaling must be finite");
}

double trajectory_reward(double s_r, int n_step, int n_poll) {
  if (n_step < 1) {
    throw std::invalid_argument(fmt::format("trajectory_reward needs n_step >= 1, got {}", n_step));
  }
  return s_r * n_poll / n_step;
}

double epsilon_at(int episode, const Hyperparams& hp) {
  const double span = hp.epsilon_start - hp.epsilon_final;
  // The normalised form keeps the midpoint exact: start - span * N/2 / N.
  const double eps = hp.normalize_epsilon_decay
                         ? hp.epsilon_start - span * static_cast<double>(episode) / hp.num_episodes
                         : hp.epsilon_start - static_cast<double>(episode) * hp.epsilon_decay;
  return std::max(hp.epsilon_final, eps);
}

Trajectory run_episode(const QTable& q, const Hyperparams& hp, EpisodeMode mode, double epsilon, CloudField field,
                       Rng& rng) {
  const GridConfig& grid = hp.grid;
  const bool eval = mode == EpisodeMode::eval;
  const SelectionParams params{eval ? 0.0 : epsilon, hp.mof_value, hp.option_length};
  const FindStop stop = eval ? FindStop::first_find : FindStop::all_found;
  const SenseAt sense_at = hp.sense_each_step ? SenseAt::each_step : SenseAt::option_end;

  Trajectory traj;
  traj.terminal = grid.start;
  VisitMemory mem(grid.grid_length, hp.binary_memory);
  Cell pos = grid.start;

  // Clamped options cost no steps, so decisions are capped separately.
  for (int decision = 0; decision < grid.max_steps && traj.n_step < grid.max_steps && !field.empty(); ++decision) {
    const SelectMode select = choose_mode(params.epsilon, rng);
    const Direction d = select_option(q, mem, pos, params, select, rng);
    const OptionOutcome outcome =
        execute_option(field, grid, pos, d, hp.option_length, grid.max_steps - traj.n_step, stop, sense_at);
    traj.transitions.push_back({pos, d});
    traj.route.insert(traj.route.end(), outcome.path.begin(), outcome.path.end());
    record_visits(mem, outcome);
    traj.n_step += outcome.primitive_steps;
    traj.n_poll += outcome.found_count;
    pos = outcome.terminal;
    if (eval && traj.n_poll > 0) {
      break;
    }
  }
  traj.terminal = pos;
  traj.cleared = field.empty();
  traj.reward = traj.n_step > 0 ? trajectory_reward(hp.reward_scaling, traj.n_step, traj.n_poll) : 0.0;
  return traj;
}

Trajectory run_episode(const QTable& q, const Hyperparams& hp, EpisodeMode mode, double epsilon, Rng& rng) {
  const int count = mode == EpisodeMode::eval ? 1 : hp.num_clouds;
  CloudField field = spawn_clouds(hp.grid, count, rng);
  return run_episode(q, hp, mode, epsilon, std::move(field), rng);
}

void learn_trajectory(QTable& q, const Trajectory& traj, const Hyperparams& hp) {
  const auto& steps = traj.transitions;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Transition& t = steps[i];
    const bool last = i + 1 == steps.size();
    if (hp.discount_rate == 0.0 || last) {
      // gamma = 0, or the terminal transition: nothing to bootstrap from.
      mc_update(q, t.state, t.option, traj.reward, hp.learning_rate);
    } else {
      q_update(q, t.state, t.option, traj.reward, steps[i + 1].state, hp.learning_rate, hp.discount_rate);
    }
  }
}

TrainReport train_agent(const Hyperparams& hp, std::uint64_t seed) {
  hp.validate();
  TrainReport report{{}, QTable(hp.grid.grid_length), seed, hp};
  report.episodes.reserve(static_cast<std::size_t>(hp.num_episodes));
  Rng master(seed);
  const double learn_until = hp.stop_learn_value * hp.num_episodes;

  for (int episode = 0; episode < hp.num_episodes; ++episode) {
    const double eps = epsilon_at(episode, hp);
    const CloudField field = spawn_clouds(hp.grid, hp.num_clouds, master);

    std::optional<Trajectory> best;
    for (int attempt = 0; attempt < hp.best_learn_value; ++attempt) {
      Rng attempt_rng(derive_seed(master.next_u64(), kAttemptStream));
      Trajectory traj = run_episode(report.q, hp, EpisodeMode::train, eps, field, attempt_rng);
      if (!best || traj.reward > best->reward) {
        best = std::move(traj);
      }
    }

    if (episode < learn_until && best->n_poll >= 1) {
      learn_trajectory(report.q, *best, hp);
    }
    report.episodes.push_back({episode, eps, best->n_step, best->n_poll, best->reward});
  }
  return report;
}

DemoParams static_demo_defaults() {
  DemoParams p;
  p.snapshot_episodes = {500, 1000, 2000};
  return p;
}

DemoParams dynamic_demo_defaults() {
  DemoParams p;
  p.snapshot_episodes = {1, 500, 1000, 2000};
  return p;
}

namespace {

// One epsilon-soft Q-learning episode over primitive moves.
void q_learning_episode(QTable& q, const GridConfig& grid, CloudField field, double epsilon, double alpha,
                        const DemoParams& params, Rng& rng) {
  Cell pos = grid.start;
  int steps = 0;
  for (int decision = 0; decision < grid.max_steps && steps < grid.max_steps; ++decision) {
    const Direction a = choose_mode(epsilon, rng) == SelectMode::explore
                            ? kDirections[static_cast<std::size_t>(rng.below(4))]
                            : first_argmax(q.row(pos));
    const MoveResult step = move(pos, a, grid);
    double reward = 0.0;
    bool found = false;
    if (step.moved) {
      ++steps;
      reward = sense(field, step.pos);
      found = collect(field, step.pos) > 0;
      if (found) {
        reward += params.found_bonus;
      }
    }
    if (found) {
      mc_update(q, pos, a, reward, alpha);
      return;
    }
    q_update(q, pos, a, reward, step.pos, alpha, params.gamma);
    pos = step.pos;
  }
}

DemoResult run_demo(const Hyperparams& hp, std::uint64_t seed, const DemoParams& params, bool fixed_cloud) {
  hp.validate();
  if (params.episodes < 1) {
    throw std::invalid_argument("demo episodes must be >= 1");
  }
  Rng rng(seed);
  DemoResult result{{}, QTable(hp.grid.grid_length), std::nullopt, {}, 0.0};
  CloudField fixed;
  if (fixed_cloud) {
    fixed = spawn_clouds(hp.grid, 1, rng);
    result.static_cloud = fixed.clouds.front();
  }

  auto snapshot_if_due = [&](int completed) {
    if (std::find(params.snapshot_episodes.begin(), params.snapshot_episodes.end(), completed) !=
        params.snapshot_episodes.end()) {
      result.snapshots.push_back({completed, result.q.max_grid()});
    }
  };

  snapshot_if_due(0);
  for (int episode = 0; episode < params.episodes; ++episode) {
    const double eps = std::max(0.0, 1.0 - static_cast<double>(episode) / params.episodes);
    CloudField field = fixed_cloud ? fixed : spawn_clouds(hp.grid, 1, rng);
    q_learning_episode(result.q, hp.grid, std::move(field), eps, hp.learning_rate, params, rng);
    snapshot_if_due(episode + 1);
  }

  if (!fixed_cloud && params.eval_episodes > 0) {
    Rng eval_rng(derive_seed(seed, kDemoEvalStream));
    long total = 0;
    for (int i = 0; i < params.eval_episodes; ++i) {
      const int steps = greedy_primitive_steps(result.q, hp.grid, spawn_clouds(hp.grid, 1, eval_rng));
      result.eval_steps.push_back(steps);
      total += steps;
    }
    result.mean_eval_steps = static_cast<double>(total) / params.eval_episodes;
  }
  return result;
}

}  // namespace

int greedy_primitive_steps(const QTable& q, const GridConfig& grid, CloudField field) {
  Cell pos = grid.start;
  int steps = 0;
  for (int decision = 0; decision < grid.max_steps && steps < grid.max_steps; ++decision) {
    const MoveResult step = move(pos, first_argmax(q.row(pos)), grid);
    if (step.moved) {
      ++steps;
      if (collect(field, step.pos) > 0) {
        return steps;
      }
    }
    pos = step.pos;
  }
  return grid.max_steps;
}

DemoResult static_demo(const Hyperparams& hp, std::uint64_t seed, const DemoParams& params) {
  return run_demo(hp, seed, params, true);
}

DemoResult dynamic_demo(const Hyperparams& hp, std::uint64_t seed, const DemoParams& params) {
  return run_demo(hp, seed, params, false);
}

}  // namespace hmc_search
