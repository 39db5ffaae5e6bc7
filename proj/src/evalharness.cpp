#include "hmc_search/evalharness.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "hmc_search/parallel.hpp"

namespace hmc_search {

EvalStats make_stats(std::vector<int> steps, int max_steps) {
  EvalStats stats;
  stats.steps = std::move(steps);
  if (stats.steps.empty()) {
    return stats;
  }
  const double total = std::accumulate(stats.steps.begin(), stats.steps.end(), 0.0);
  stats.mean = total / static_cast<double>(stats.steps.size());
  std::vector<int> sorted = stats.steps;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>((sorted.size() - 1) / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  stats.median = *mid;
  stats.failures = static_cast<int>(std::count(stats.steps.begin(), stats.steps.end(), max_steps));
  return stats;
}

int agent_steps(const QTable& q, const Hyperparams& hp, const Cloud& cloud) {
  Rng unused(0);  // greedy episodes draw nothing
  const Trajectory traj = run_episode(q, hp, EpisodeMode::eval, 0.0, CloudField{{cloud}}, unused);
  return traj.n_poll > 0 ? traj.n_step : hp.grid.max_steps;
}

EvalStats evaluate_agent(const QTable& q, const Hyperparams& hp, int n_episodes, Rng& rng) {
  std::vector<int> steps;
  steps.reserve(static_cast<std::size_t>(std::max(n_episodes, 0)));
  for (int i = 0; i < n_episodes; ++i) {
    steps.push_back(agent_steps(q, hp, make_cloud(hp.grid, random_cell(hp.grid, rng))));
  }
  return make_stats(std::move(steps), hp.grid.max_steps);
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::win: return "win";
    case Outcome::tie: return "tie";
    case Outcome::loss: return "loss";
  }
  return "?";
}

DuelOutcome tally(const std::vector<int>& agent, const std::vector<int>& opponent) {
  if (agent.size() != opponent.size()) {
    throw std::invalid_argument("tally needs equally long step lists");
  }
  DuelOutcome out;
  for (std::size_t i = 0; i < agent.size(); ++i) {
    out.add(duel(agent[i], opponent[i]));
  }
  return out;
}

DuelReport run_duels(const QTable& q, const Hyperparams& hp, int n, Rng& rng) {
  const PatternPath snake = snake_path(hp.grid.grid_length, hp.grid.pollution_diameter);
  const PatternPath spiral = spiral_path(hp.grid.grid_length, hp.grid.pollution_diameter);
  DuelReport report;
  std::vector<int> steps;
  for (int i = 0; i < n; ++i) {
    const Cloud cloud = make_cloud(hp.grid, random_cell(hp.grid, rng));
    DuelRecord rec{cloud.center, agent_steps(q, hp, cloud), steps_to_find(snake, cloud, hp.grid.max_steps),
                   steps_to_find(spiral, cloud, hp.grid.max_steps)};
    report.vs_snake.add(duel(rec.agent, rec.snake));
    report.vs_spiral.add(duel(rec.agent, rec.spiral));
    steps.push_back(rec.agent);
    report.rounds.push_back(rec);
  }
  report.agent = make_stats(std::move(steps), hp.grid.max_steps);
  return report;
}

namespace {

template <typename StepsFn>
Eigen::ArrayXXi step_grid(const GridConfig& grid, StepsFn&& steps_for) {
  Eigen::ArrayXXi out(grid.grid_length, grid.grid_length);
  for (int y = 0; y < grid.grid_length; ++y) {
    for (int x = 0; x < grid.grid_length; ++x) {
      out(y, x) = steps_for(make_cloud(grid, {x, y}));
    }
  }
  return out;
}

}  // namespace

Eigen::ArrayXXi agent_step_grid(const QTable& q, const Hyperparams& hp) {
  return step_grid(hp.grid, [&](const Cloud& c) { return agent_steps(q, hp, c); });
}

Eigen::ArrayXXi pattern_step_grid(const PatternPath& path, const Hyperparams& hp) {
  return step_grid(hp.grid, [&](const Cloud& c) { return steps_to_find(path, c, hp.grid.max_steps); });
}

ScoreMap compare(const Eigen::ArrayXXi& agent_steps, const Eigen::ArrayXXi& opponent_steps) {
  if (agent_steps.rows() != opponent_steps.rows() || agent_steps.cols() != opponent_steps.cols()) {
    throw std::invalid_argument("score map grids differ in shape");
  }
  // sign(opponent - agent): +1 win, 0 tie, -1 loss
  const Eigen::ArrayXXi diff = opponent_steps - agent_steps;
  const Eigen::ArrayXXi outcome = (diff > 0).cast<int>() - (diff < 0).cast<int>();
  return {agent_steps, opponent_steps, outcome};
}

DuelOutcome ScoreMap::totals() const {
  DuelOutcome out;
  out.wins = static_cast<int>((outcome == 1).count());
  out.ties = static_cast<int>((outcome == 0).count());
  out.losses = static_cast<int>((outcome == -1).count());
  return out;
}

ScoreMap score_map(const QTable& q, const Hyperparams& hp, const PatternPath& opponent) {
  return compare(agent_step_grid(q, hp), pattern_step_grid(opponent, hp));
}

Histogram make_histogram(double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) {
    throw std::invalid_argument("histogram needs bins >= 1 and hi > lo");
  }
  return {lo, (hi - lo) / bins, std::vector<int>(static_cast<std::size_t>(bins), 0)};
}

void Histogram::add(double value) {
  const auto bins = static_cast<long>(counts.size());
  const long bin = std::clamp(static_cast<long>((value - lo) / width), 0L, bins - 1);
  ++counts[static_cast<std::size_t>(bin)];
}

int Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

std::uint64_t eval_seed(std::uint64_t train_seed) { return derive_seed(train_seed, 0xE7A1); }

PopulationReport population_stats(const Hyperparams& hp, int n_agents, std::uint64_t base_seed, int eval_episodes,
                                  int jobs) {
  if (n_agents < 1) {
    throw std::invalid_argument("population needs n_agents >= 1");
  }
  PopulationReport report;
  report.agents = parallel_map(static_cast<std::size_t>(n_agents), jobs, [&](std::size_t i) {
    const std::uint64_t seed = base_seed + i;
    const TrainReport trained = train_agent(hp, seed);
    Rng rng(eval_seed(seed));
    const DuelReport duels = run_duels(trained.q, hp, eval_episodes, rng);
    return AgentSummary{seed, duels.agent, duels.vs_snake};
  });

  report.mean_steps = make_histogram(0.0, hp.grid.max_steps, 40);
  report.win_percent = make_histogram(0.0, 100.0, 20);
  for (const AgentSummary& a : report.agents) {
    report.mean_steps.add(a.eval.mean);
    report.win_percent.add(a.win_percent());
  }
  return report;
}

Eigen::ArrayXXi route_heatmap(const QTable& q, const Hyperparams& hp, int n_episodes, Rng& rng) {
  const GridConfig& grid = hp.grid;
  Eigen::ArrayXXi counts = Eigen::ArrayXXi::Zero(grid.grid_length, grid.grid_length);
  Rng unused(0);
  for (int i = 0; i < n_episodes; ++i) {
    CloudField field{{make_cloud(grid, random_cell(grid, rng))}};
    const Trajectory traj = run_episode(q, hp, EpisodeMode::eval, 0.0, std::move(field), unused);
    ++counts(grid.start.y, grid.start.x);
    for (const Cell& c : traj.route) {
      ++counts(c.y, c.x);
    }
  }
  return counts;
}

}  // namespace hmc_search
