#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "hmc_search/env.hpp"
#include "hmc_search/rng.hpp"

namespace hmc_search {

/// Dense action-value table: one row per cell (row-major cell index y*L + x),
/// one column per option direction.
template <typename Scalar>
class BasicQTable {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 4, Eigen::RowMajor>;
  using Row = Eigen::Array<Scalar, 1, 4>;
  using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit BasicQTable(int grid_length)
      : grid_length_(grid_length), values_(Values::Zero(grid_length * grid_length, 4)) {
    if (grid_length < 1) {
      throw std::invalid_argument("QTable grid_length must be >= 1");
    }
  }

  [[nodiscard]] int grid_length() const { return grid_length_; }
  [[nodiscard]] int row_index(Cell c) const { return c.y * grid_length_ + c.x; }

  Scalar& operator()(Cell c, Direction d) { return values_(row_index(c), index_of(d)); }
  Scalar operator()(Cell c, Direction d) const { return values_(row_index(c), index_of(d)); }

  [[nodiscard]] Row row(Cell c) const { return values_.row(row_index(c)); }
  [[nodiscard]] Scalar max_at(Cell c) const { return values_.row(row_index(c)).maxCoeff(); }

  /// Max over directions per cell, laid out as (row = y, col = x).
  [[nodiscard]] Grid max_grid() const {
    Grid out(grid_length_, grid_length_);
    for (int y = 0; y < grid_length_; ++y) {
      for (int x = 0; x < grid_length_; ++x) {
        out(y, x) = max_at({x, y});
      }
    }
    return out;
  }

  [[nodiscard]] const Values& values() const { return values_; }
  Values& values() { return values_; }

  friend bool operator==(const BasicQTable& a, const BasicQTable& b) {
    return a.grid_length_ == b.grid_length_ && (a.values_ == b.values_).all();
  }

 private:
  int grid_length_;
  Values values_;
};

using QTable = BasicQTable<double>;

namespace detail {
template <typename Scalar>
void require_finite(Scalar r) {
  if (!std::isfinite(r)) {
    throw std::invalid_argument("reward must be finite");
  }
}
}  // namespace detail

/// One-step Q-learning: Q(s,o) += alpha * (r + gamma * max Q(s',.) - Q(s,o)).
template <typename Scalar>
void q_update(BasicQTable<Scalar>& q, Cell s, Direction o, Scalar r, Cell s_next, Scalar alpha, Scalar gamma) {
  detail::require_finite(r);
  const Scalar target = r + gamma * q.max_at(s_next);
  Scalar& entry = q(s, o);
  entry += alpha * (target - entry);
}

/// Monte Carlo update toward a whole-trajectory return: Q(s,o) += alpha * (r_t - Q(s,o)).
template <typename Scalar>
void mc_update(BasicQTable<Scalar>& q, Cell s, Direction o, Scalar r_t, Scalar alpha) {
  detail::require_finite(r_t);
  Scalar& entry = q(s, o);
  entry += alpha * (r_t - entry);
}

/// Per-episode visit counts; counts(y, x).
class VisitMemory {
 public:
  explicit VisitMemory(int grid_length, bool binary = false)
      : counts_(Eigen::ArrayXXi::Zero(grid_length, grid_length)), binary_(binary) {}

  [[nodiscard]] int count(Cell c) const { return counts_(c.y, c.x); }
  /// Value the output filter subtracts: the count, or 0/1 in binary mode.
  [[nodiscard]] int filter_value(Cell c) const {
    const int n = counts_(c.y, c.x);
    return binary_ ? (n > 0 ? 1 : 0) : n;
  }
  void increment(Cell c) { ++counts_(c.y, c.x); }

  [[nodiscard]] const Eigen::ArrayXXi& counts() const { return counts_; }
  [[nodiscard]] bool binary() const { return binary_; }

 private:
  Eigen::ArrayXXi counts_;
  bool binary_;
};

struct OptionOutcome {
  Cell start;
  Direction direction = Direction::up;
  std::vector<Cell> path;  // cells actually entered, in order
  int primitive_steps = 0;
  int found_count = 0;
  Cell terminal;
  bool clamped = false;  // stopped by the grid boundary
};

struct SelectionParams {
  double epsilon = 0.0;
  double s_mof = 0.0;
  int option_length = 1;
};

enum class SelectMode { explore, exploit };

/// When collection ends an option early.
enum class FindStop {
  first_find,  // single-cloud evaluation: stop at the first detection
  all_found,   // multi-cloud training: stop once no clouds remain
};

/// Draws explore with probability epsilon. No draw is consumed at 0 or 1.
SelectMode choose_mode(double epsilon, Rng& rng);

/// Cell where a cloud-free run of `option_length` moves in `d` from `s` ends.
[[nodiscard]] Cell option_terminal(Cell s, Direction d, int option_length, int grid_length);

/// Q(s,o) - s_mof * M(s'(o)) for every direction o.
template <typename Scalar>
[[nodiscard]] Eigen::Array<Scalar, 1, 4> filtered_scores(const BasicQTable<Scalar>& q, const VisitMemory& mem,
                                                        Cell s, Scalar s_mof, int option_length) {
  Eigen::Array<Scalar, 1, 4> scores = q.row(s);
  if (s_mof != Scalar(0)) {
    for (Direction d : kDirections) {
      const Cell terminal = option_terminal(s, d, option_length, q.grid_length());
      scores(index_of(d)) -= s_mof * static_cast<Scalar>(mem.filter_value(terminal));
    }
  }
  return scores;
}

/// First index of the maximum, i.e. ties resolve up, down, left, right.
template <typename Derived>
[[nodiscard]] Direction first_argmax(const Eigen::ArrayBase<Derived>& scores) {
  int best = 0;
  for (int i = 1; i < 4; ++i) {
    if (scores(i) > scores(best)) {
      best = i;
    }
  }
  return kDirections[static_cast<std::size_t>(best)];
}

/// Explore: uniform direction, memory ignored. Exploit: argmax of the memory-filtered scores.
template <typename Scalar>
Direction select_option(const BasicQTable<Scalar>& q, const VisitMemory& mem, Cell s, const SelectionParams& params,
                        SelectMode mode, Rng& rng) {
  if (mode == SelectMode::explore) {
    return kDirections[static_cast<std::size_t>(rng.below(4))];
  }
  return first_argmax(filtered_scores(q, mem, s, static_cast<Scalar>(params.s_mof), params.option_length));
}

/// Where an option senses the cloud field.
enum class SenseAt {
  each_step,   // every entered cell
  option_end,  // only the cell the option stops on
};

/// Runs up to `option_length` moves in `d`, sensing and collecting after each one.
/// Stops early on a boundary clamp, an exhausted budget, or a find that ends the episode.
OptionOutcome execute_option(CloudField& field, const GridConfig& config, Cell pos, Direction d, int option_length,
                             int steps_remaining, FindStop stop, SenseAt sense_at = SenseAt::each_step);

/// Counts every entered cell once, plus one more on the terminal cell when the option hit the boundary.
void record_visits(VisitMemory& mem, const OptionOutcome& outcome);

}  // namespace hmc_search
