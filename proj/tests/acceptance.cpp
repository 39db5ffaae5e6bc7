// Acceptance checks, one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include <fmt/format.h>

#include "hmc_search/baselines.hpp"
#include "hmc_search/cli.hpp"
#include "hmc_search/evalharness.hpp"
#include "hmc_search/parallel.hpp"
#include "hmc_search/policy.hpp"
#include "hmc_search/sweep.hpp"
#include "hmc_search/training.hpp"

using namespace hmc_search;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

template <typename T>
T lower_median(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

Verdict pattern_fidelity() {
  const Hyperparams hp;
  auto stats = [&](PatternKind k) {
    const Eigen::ArrayXXi g = pattern_step_grid(make_pattern(k, 20, 5), hp);
    return make_stats(std::vector<int>(g.data(), g.data() + g.size()), hp.grid.max_steps);
  };
  const EvalStats snake = stats(PatternKind::snake);
  const EvalStats spiral = stats(PatternKind::spiral);
  const bool ok = std::abs(snake.mean - 53.51) <= 0.15 * 53.51 && std::abs(snake.median - 54) <= 3 &&
                  std::abs(spiral.mean - 66.74) <= 0.15 * 66.74;
  return {ok, fmt::format("snake mean {:.2f} median {}, spiral mean {:.2f}", snake.mean, snake.median, spiral.mean)};
}

Verdict coverage() {
  int configs = 0;
  int misses = 0;
  for (int g = 10; g <= 40; ++g) {
    for (int d = 1; d <= std::min(7, g); ++d) {
      for (PatternKind k : {PatternKind::snake, PatternKind::spiral}) {
        const PatternPath p = make_pattern(k, g, d);
        const int never = static_cast<int>(p.cells.size()) + 1;
        for (int y = 0; y < g; ++y) {
          for (int x = 0; x < g; ++x) {
            misses += steps_to_find(p, make_cloud(g, {x, y}, d), never) == never;
          }
        }
        ++configs;
      }
    }
  }
  return {misses == 0, fmt::format("{} pattern/grid configurations, {} undetected centres", configs, misses)};
}

Verdict qlearning_failure() {
  const Hyperparams hp;
  DemoParams p = dynamic_demo_defaults();
  p.eval_episodes = 1000;
  const std::vector<double> means = parallel_map(3, jobs(), [&](std::size_t i) {
    return dynamic_demo(hp, i + 1, p).mean_eval_steps;
  });
  int ok = 0;
  for (double m : means) ok += m >= 370.0 && m <= 400.0;
  return {ok >= 2, fmt::format("mean eval steps {:.1f} {:.1f} {:.1f}", means[0], means[1], means[2])};
}

bool positive_path_to_cloud(const Eigen::ArrayXXd& max_q, const Cloud& cloud, const GridConfig& grid) {
  if (cloud.covers(grid.start)) return true;
  if (!(max_q(grid.start.y, grid.start.x) > 0.0)) return false;
  std::vector<char> seen(static_cast<std::size_t>(grid.cell_count()), 0);
  std::queue<Cell> open;
  open.push(grid.start);
  seen[static_cast<std::size_t>(grid.index(grid.start))] = 1;
  while (!open.empty()) {
    const Cell c = open.front();
    open.pop();
    for (Direction d : kDirections) {
      const Cell n = shifted(c, d);
      if (!grid.contains(n) || seen[static_cast<std::size_t>(grid.index(n))]) continue;
      if (cloud.covers(n)) return true;
      if (max_q(n.y, n.x) > 0.0) {
        seen[static_cast<std::size_t>(grid.index(n))] = 1;
        open.push(n);
      }
    }
  }
  return false;
}

Verdict static_propagation() {
  const Hyperparams hp;
  const DemoParams p = static_demo_defaults();
  const std::vector<int> found = parallel_map(3, jobs(), [&](std::size_t i) {
    const DemoResult r = static_demo(hp, i + 1, p);
    const auto snap = std::find_if(r.snapshots.begin(), r.snapshots.end(),
                                   [](const QSnapshot& s) { return s.episode == 2000; });
    return static_cast<int>(snap != r.snapshots.end() && positive_path_to_cloud(snap->max_q, *r.static_cloud, hp.grid));
  });
  const int ok = found[0] + found[1] + found[2];
  return {ok >= 2, fmt::format("{}/3 seeds show a positive path", ok)};
}

Verdict update_equivalence() {
  Rng rng(2718);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    QTable a(4);
    for (Eigen::Index k = 0; k < a.values().size(); ++k) {
      a.values().data()[k] = rng.uniform() * 200.0 - 100.0;
    }
    QTable b = a;
    const Cell s{rng.below(4), rng.below(4)};
    const Cell s2{rng.below(4), rng.below(4)};
    const Direction d = kDirections[static_cast<std::size_t>(rng.below(4))];
    const double r = rng.uniform() * 200.0 - 100.0;
    const double alpha = rng.uniform();
    q_update(a, s, d, r, s2, alpha, 0.0);
    mc_update(b, s, d, r, alpha);
    worst = std::max(worst, std::abs(a(s, d) - b(s, d)));
  }
  return {worst <= 1e-12, fmt::format("max |difference| {:.3g} over 1e5 updates", worst)};
}

Verdict mof_properties() {
  Rng rng(31415);
  int violations = 0;
  int checked = 0;
  int shift_mismatch = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const int L = 4 + rng.below(8);
    QTable q(L);
    for (Eigen::Index k = 0; k < q.values().size(); ++k) {
      q.values().data()[k] = rng.uniform() * 10.0 - 5.0;
    }
    VisitMemory mem(L);
    VisitMemory shifted_mem(L);
    const int shift = 1 + rng.below(5);
    for (int y = 0; y < L; ++y) {
      for (int x = 0; x < L; ++x) {
        const int n = rng.below(3) == 0 ? rng.below(4) : 0;
        for (int k = 0; k < n; ++k) mem.increment({x, y});
        for (int k = 0; k < n + shift; ++k) shifted_mem.increment({x, y});
      }
    }
    const Cell s{rng.below(L), rng.below(L)};
    const int J = 1 + rng.below(4);
    const double range = q.values().maxCoeff() - q.values().minCoeff();
    const SelectionParams big{0.0, range + 0.01 + rng.uniform() * 10.0, J};
    const Direction pick = select_option(q, mem, s, big, SelectMode::exploit, rng);
    bool unvisited = false;
    for (Direction d : kDirections) unvisited |= mem.count(option_terminal(s, d, J, L)) == 0;
    if (unvisited) {
      ++checked;
      violations += mem.count(option_terminal(s, pick, J, L)) != 0;
    }
    const SelectionParams any{0.0, rng.uniform() * 20.0, J};
    shift_mismatch += select_option(q, mem, s, any, SelectMode::exploit, rng) !=
                      select_option(q, shifted_mem, s, any, SelectMode::exploit, rng);
  }
  return {violations == 0 && shift_mismatch == 0,
          fmt::format("{} visited picks in {} cases, {} shift mismatches in 20000", violations, checked,
                      shift_mismatch)};
}

Verdict competitiveness() {
  const Hyperparams hp;
  const PatternPath snake = snake_path(hp.grid.grid_length, hp.grid.pollution_diameter);
  struct Agent {
    double mean = 0.0;
    int map_wins = 0;
  };
  const std::vector<Agent> agents = parallel_map(20, jobs(), [&](std::size_t i) {
    const std::uint64_t seed = i + 1;
    const QTable q = train_agent(hp, seed).q;
    Rng rng(eval_seed(seed));
    const EvalStats e = evaluate_agent(q, hp, 1000, rng);
    return Agent{e.mean, score_map(q, hp, snake).totals().wins};
  });
  std::vector<double> means;
  int best_wins = 0;
  for (const Agent& a : agents) {
    means.push_back(a.mean);
    best_wins = std::max(best_wins, a.map_wins);
  }
  const double median = lower_median(means);
  const double best = *std::min_element(means.begin(), means.end());
  const bool a = median < 66.74;
  const bool b = best_wins > 200;
  const bool c = best < 60.0;
  return {a && b && c, fmt::format("(a) median mean {:.2f} < 66.74 {}; (b) best score-map wins {}/400 {}; "
                                   "(c) best mean {:.2f} < 60 {}",
                                   median, a ? "ok" : "NO", best_wins, b ? "ok" : "NO", best, c ? "ok" : "NO")};
}

Verdict tuning_shape() {
  SweepSpec length;
  length.parameter = "option_length";
  length.values = {1, 2, 3, 4, 5, 6};
  length.runs_per_value = 20;
  const SweepResult lr = run_sweep(length, jobs());
  std::vector<std::pair<double, double>> ranked;
  for (const SweepPoint& p : lr.points) ranked.emplace_back(p.steps.mean, p.value);
  std::sort(ranked.begin(), ranked.end());
  const bool three_top2 = ranked[0].second == 3 || ranked[1].second == 3;

  SweepSpec mof = length;
  mof.parameter = "mof_value";
  mof.values = {0, 1, 5, 10, 20};
  const SweepResult mr = run_sweep(mof, jobs());
  const SweepPoint& m10 = *mr.find(10);
  const SweepPoint& m20 = *mr.find(20);
  const double diff = std::abs(m10.steps.mean - m20.steps.mean);
  const double width = m10.steps.half_width + m20.steps.half_width;
  const bool flat = diff < width;

  std::string curve;
  for (const SweepPoint& p : lr.points) curve += fmt::format(" J{}={:.2f}", p.value, p.steps.mean);
  return {three_top2 && flat,
          fmt::format("option length means:{}; top-2 = {{{}, {}}} {}; |mean(10)-mean(20)| = {:.2f} vs {:.2f} {}", curve,
                      ranked[0].second, ranked[1].second, three_top2 ? "ok" : "NO", diff, width, flat ? "ok" : "NO")};
}

Verdict reward_exactness() {
  Rng rng(99);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const double s_r = rng.uniform() * 100.0;
    const int n_step = 1 + rng.below(400);
    const int n_poll = rng.below(4) == 0 ? 0 : rng.below(10);
    const double r = trajectory_reward(s_r, n_step, n_poll);
    bad += r != s_r * n_poll / n_step;
    bad += n_poll == 0 && r != 0.0;
  }
  return {bad == 0, fmt::format("{} mismatches in 10000 draws", bad)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / fmt::format("hmc_search_acceptance_{}", ::getpid());
  fs::remove_all(dir);
  auto run = [&](std::vector<std::string> args, const std::string& out) {
    args.insert(args.end(), {"--out", (dir / out).string()});
    // Keep the CLI's own summary lines out of the report.
    std::fflush(stdout);
    const int saved = ::dup(STDOUT_FILENO);
    const int null_fd = ::open("/dev/null", O_WRONLY);
    ::dup2(null_fd, STDOUT_FILENO);
    const int rc = dispatch(args);
    std::fflush(stdout);
    ::dup2(saved, STDOUT_FILENO);
    ::close(null_fd);
    ::close(saved);
    return rc;
  };
  int rc = 0;
  rc |= run({"train", "--seed", "7"}, "train_a");
  rc |= run({"train", "--seed", "7"}, "train_b");
  rc |= run({"scoremap", "--seed", "7"}, "map_a");
  rc |= run({"rerun", (dir / "map_a" / "manifest.json").string()}, "map_b");
  const bool q_same =
      !slurp(dir / "train_a" / "qtable.csv").empty() && slurp(dir / "train_a" / "qtable.csv") == slurp(dir / "train_b" / "qtable.csv");
  bool map_same = true;
  for (const char* f : {"scoremap_snake.csv", "scoremap_spiral.csv"}) {
    map_same = map_same && !slurp(dir / "map_a" / f).empty() && slurp(dir / "map_a" / f) == slurp(dir / "map_b" / f);
  }
  fs::remove_all(dir);
  return {rc == 0 && q_same && map_same,
          fmt::format("exit codes {}, qtable identical {}, score maps identical {}", rc == 0 ? "0" : "nonzero", q_same,
                      map_same)};
}

Verdict epsilon_schedule() {
  const Hyperparams hp;
  const bool ok = epsilon_at(0, hp) == 1.0 && epsilon_at(hp.num_episodes / 2, hp) == 0.5 &&
                  epsilon_at(hp.num_episodes, hp) == 0.0 && epsilon_at(hp.num_episodes + 1, hp) == 0.0 &&
                  epsilon_at(10 * hp.num_episodes, hp) == 0.0;
  return {ok, fmt::format("eps(0)={} eps(N/2)={} eps(N)={}", epsilon_at(0, hp), epsilon_at(hp.num_episodes / 2, hp),
                          epsilon_at(hp.num_episodes, hp))};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime bound
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "pattern aggregate fidelity", 1.0, pattern_fidelity},
      {2, "pattern coverage", 10.0, coverage},
      {3, "plain Q-learning fails on moving clouds", 60.0, qlearning_failure},
      {4, "static value propagation", 60.0, static_propagation},
      {5, "update rule equivalence", 1.0, update_equivalence},
      {6, "memory filter properties", 1.0, mof_properties},
      {7, "agent competitiveness", 300.0, competitiveness},
      {8, "tuning curve shape", 1800.0, tuning_shape},
      {9, "trajectory reward exactness", 0.0, reward_exactness},
      {10, "determinism", 10.0, determinism},
      {11, "epsilon schedule", 0.0, epsilon_schedule},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt::format("{:.2f}s", secs);
    if (c.budget_s > 0.0) {
      timing += fmt::format(" of {:.0f}s", c.budget_s);
      if (secs > c.budget_s) {
        v.pass = false;
        timing += " (over budget)";
      }
    }
    failed += v.pass ? 0 : 1;
    fmt::print("{} criterion {:>2} {}: {} [{}]\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail, timing);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
