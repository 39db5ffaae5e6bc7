#include <doctest.h>

#include <queue>

#include "hmc_search/training.hpp"

using namespace hmc_search;

namespace {

Hyperparams small_hp(int episodes = 200) {
  Hyperparams hp;
  hp.num_episodes = episodes;
  return hp;
}

}  // namespace

TEST_CASE("trajectory reward") {
  CHECK(trajectory_reward(30.0, 60, 1) == 0.5);
  CHECK(trajectory_reward(30.0, 17, 0) == 0.0);
  CHECK(trajectory_reward(30.0, 7, 3) == 30.0 * 3 / 7);
  CHECK_THROWS_AS(trajectory_reward(30.0, 0, 1), std::invalid_argument);
}

TEST_CASE("epsilon schedule endpoints") {
  const Hyperparams hp;
  CHECK(epsilon_at(0, hp) == 1.0);
  CHECK(epsilon_at(500, hp) == 0.5);
  CHECK(epsilon_at(1000, hp) == 0.0);
  CHECK(epsilon_at(5000, hp) == 0.0);
  Hyperparams raw = hp;
  raw.normalize_epsilon_decay = false;
  raw.epsilon_decay = 0.002;
  CHECK(epsilon_at(250, raw) == doctest::Approx(0.5));
  CHECK(epsilon_at(900, raw) == 0.0);
}

TEST_CASE("hyperparameter validation") {
  CHECK_NOTHROW(Hyperparams{}.validate());
  Hyperparams hp;
  hp.option_length = 0;
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  hp = Hyperparams{};
  hp.learning_rate = 0.0;
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  hp = Hyperparams{};
  hp.stop_learn_value = 1.5;
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  hp = Hyperparams{};
  hp.epsilon_final = 0.5;
  hp.epsilon_start = 0.2;
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
}

TEST_CASE("eval episode ends at the first detection") {
  const Hyperparams hp;
  QTable q(20);
  Rng rng(1);
  CloudField field{{make_cloud(hp.grid, {0, 9})}};
  // All-zero table: greedy with ties resolving up then down, filtered by memory.
  const Trajectory t = run_episode(q, hp, EpisodeMode::eval, 0.0, field, rng);
  CHECK(t.n_poll == 1);
  CHECK(t.n_step == 7);  // (0,7) is the first covered cell going down
  CHECK(t.route.back() == Cell{0, 7});
  CHECK(t.reward == trajectory_reward(hp.reward_scaling, 7, 1));
  CHECK(t.n_step == static_cast<int>(t.route.size()));
}

TEST_CASE("train episode continues until every cloud is found") {
  Hyperparams hp;
  hp.num_clouds = 3;
  QTable q(20);
  Rng rng(11);
  CloudField field{{make_cloud(hp.grid, {0, 6}), make_cloud(hp.grid, {0, 14}), make_cloud(hp.grid, {19, 19})}};
  const Trajectory t = run_episode(q, hp, EpisodeMode::train, 0.0, field, rng);
  CHECK(t.n_poll >= 2);
  CHECK(t.n_step <= hp.grid.max_steps);
  CHECK(t.cleared == (t.n_poll == 3));
}

TEST_CASE("episodes respect the step budget") {
  Hyperparams hp;
  hp.grid.max_steps = 25;
  QTable q(20);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Trajectory t = run_episode(q, hp, EpisodeMode::train, 1.0, rng);
    CHECK(t.n_step <= 25);
    CHECK(static_cast<int>(t.transitions.size()) <= 25);
  }
}

TEST_CASE("learn_trajectory applies one reward to every visit") {
  Hyperparams hp;
  QTable q(20);
  Trajectory t;
  t.transitions = {{{0, 0}, Direction::down}, {{0, 3}, Direction::right}, {{0, 0}, Direction::down}};
  t.reward = 2.0;
  learn_trajectory(q, t, hp);
  CHECK(q({0, 0}, Direction::down) == doctest::Approx(0.2 + 0.1 * (2.0 - 0.2)));
  CHECK(q({0, 3}, Direction::right) == doctest::Approx(0.2));
  CHECK(q.values().abs().sum() == doctest::Approx(0.38 + 0.2));
}

TEST_CASE("discounted learning bootstraps from the next decision state") {
  Hyperparams hp;
  hp.discount_rate = 0.5;
  QTable q(20);
  q({0, 3}, Direction::up) = 4.0;
  Trajectory t;
  t.transitions = {{{0, 0}, Direction::down}, {{0, 3}, Direction::right}};
  t.reward = 1.0;
  learn_trajectory(q, t, hp);
  CHECK(q({0, 0}, Direction::down) == doctest::Approx(0.1 * (1.0 + 0.5 * 4.0)));
  CHECK(q({0, 3}, Direction::right) == doctest::Approx(0.1));
}

TEST_CASE("training is deterministic per seed") {
  const Hyperparams hp = small_hp();
  const TrainReport a = train_agent(hp, 5);
  const TrainReport b = train_agent(hp, 5);
  const TrainReport c = train_agent(hp, 6);
  CHECK(a.q == b.q);
  CHECK_FALSE(a.q == c.q);
  CHECK(a.episodes.size() == 200);
  CHECK(a.episodes[100].epsilon == 0.5);
}

TEST_CASE("failed trajectories are not learned from") {
  Hyperparams hp = small_hp(50);
  hp.grid.max_steps = 1;  // hardly anything is found in one step
  const TrainReport r = train_agent(hp, 3);
  int successes = 0;
  for (const EpisodeRecord& e : r.episodes) {
    successes += e.n_poll > 0;
  }
  if (successes == 0) {
    CHECK(r.q.values().abs().maxCoeff() == 0.0);
  }
  CHECK(successes <= 50);
}

TEST_CASE("stop_learn freezes the table") {
  Hyperparams hp = small_hp(100);
  hp.stop_learn_value = 0.01;  // only episode 0 may learn
  const TrainReport r = train_agent(hp, 8);
  const double bound = r.episodes[0].n_poll > 0 ? r.episodes[0].reward : 0.0;
  CHECK(r.q.values().abs().maxCoeff() <= bound + 1e-12);
  const TrainReport full = train_agent(small_hp(100), 8);
  CHECK((full.q.values() != 0.0).count() > (r.q.values() != 0.0).count());
}

TEST_CASE("best-of attempts replay the episode's clouds and keep the best") {
  Hyperparams hp = small_hp(100);
  hp.best_learn_value = 3;
  const TrainReport a = train_agent(hp, 4);
  const TrainReport b = train_agent(hp, 4);
  CHECK(a.q == b.q);
  const TrainReport single = train_agent(small_hp(100), 4);
  double best_mean = 0.0;
  double single_mean = 0.0;
  for (int i = 0; i < 100; ++i) {
    best_mean += a.episodes[static_cast<std::size_t>(i)].reward;
    single_mean += single.episodes[static_cast<std::size_t>(i)].reward;
  }
  CHECK(best_mean > single_mean);
}

TEST_CASE("static demo snapshots") {
  Hyperparams hp;
  DemoParams p = static_demo_defaults();
  p.snapshot_episodes = {0, 10, 50};
  p.episodes = 50;
  const DemoResult r = static_demo(hp, 1, p);
  REQUIRE(r.snapshots.size() == 3);
  CHECK(r.snapshots[0].episode == 0);
  CHECK(r.snapshots[0].max_q.abs().maxCoeff() == 0.0);
  CHECK((r.snapshots[2].max_q == r.q.max_grid()).all());
  CHECK(r.static_cloud.has_value());
  CHECK(r.eval_steps.empty());
}

TEST_CASE("static demo spreads value from the cloud toward the start") {
  const Hyperparams hp;
  const DemoResult r = static_demo(hp, 1, static_demo_defaults());
  REQUIRE(r.static_cloud.has_value());
  const Eigen::ArrayXXd& m = r.snapshots.back().max_q;
  // Breadth-first search over strictly positive cells.
  std::vector<std::vector<bool>> seen(20, std::vector<bool>(20, false));
  std::queue<Cell> open;
  bool reached = false;
  if (m(0, 0) > 0.0) {
    open.push({0, 0});
    seen[0][0] = true;
  }
  while (!open.empty() && !reached) {
    const Cell c = open.front();
    open.pop();
    for (Direction d : kDirections) {
      const Cell n = shifted(c, d);
      if (!hp.grid.contains(n) || seen[n.y][n.x]) continue;
      if (r.static_cloud->covers(n)) {
        reached = true;
        break;
      }
      if (m(n.y, n.x) > 0.0) {
        seen[n.y][n.x] = true;
        open.push(n);
      }
    }
  }
  CHECK(reached);
}

TEST_CASE("dynamic demo evaluation fails nearly always") {
  const Hyperparams hp;
  DemoParams p = dynamic_demo_defaults();
  p.eval_episodes = 200;
  const DemoResult r = dynamic_demo(hp, 2, p);
  CHECK(r.snapshots.size() == 4);
  CHECK(r.eval_steps.size() == 200);
  CHECK(r.mean_eval_steps >= 370.0);
  CHECK_FALSE(r.static_cloud.has_value());
}

TEST_CASE("greedy primitive agent with an empty table walks up into the wall") {
  const GridConfig g;
  QTable q(20);
  CHECK(greedy_primitive_steps(q, g, CloudField{{make_cloud(g, {10, 10})}}) == g.max_steps);
  q({0, 0}, Direction::right) = 1.0;
  for (int x = 1; x < 20; ++x) q({x, 0}, Direction::right) = 1.0;
  CHECK(greedy_primitive_steps(q, g, CloudField{{make_cloud(g, {5, 1})}}) == 3);
}
