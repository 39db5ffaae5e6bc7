#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hmc_search/rng.hpp"

namespace hmc_search {

/// Grid cell; x is the column (grows right), y the row (grows down).
struct Cell {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Direction : std::uint8_t { up = 0, down = 1, left = 2, right = 3 };

/// Fixed iteration order; also the argmax tie-break order.
inline constexpr std::array<Direction, 4> kDirections = {Direction::up, Direction::down,
                                                         Direction::left, Direction::right};

[[nodiscard]] constexpr int index_of(Direction d) { return static_cast<int>(d); }
[[nodiscard]] std::string_view to_string(Direction d);
[[nodiscard]] std::optional<Direction> parse_direction(std::string_view name);

/// Neighbour of `c` in direction `d`, without bounds handling.
[[nodiscard]] constexpr Cell shifted(Cell c, Direction d) {
  switch (d) {
    case Direction::up: return {c.x, c.y - 1};
    case Direction::down: return {c.x, c.y + 1};
    case Direction::left: return {c.x - 1, c.y};
    case Direction::right: return {c.x + 1, c.y};
  }
  return c;
}

struct GridConfig {
  int grid_length = 20;
  int pollution_diameter = 5;
  Cell start{0, 0};
  int max_steps = 400;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  [[nodiscard]] bool contains(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < grid_length && c.y < grid_length;
  }
  [[nodiscard]] int cell_count() const { return grid_length * grid_length; }
  [[nodiscard]] int index(Cell c) const { return c.y * grid_length + c.x; }
  [[nodiscard]] Cell cell_at(int index) const { return {index % grid_length, index / grid_length}; }
};

/// Intensity at distance `dist` from the centre of a cloud of `diameter` cells.
[[nodiscard]] double intensity_profile(double dist, int diameter);

/// A disc of radius diameter/2 around `center`, clipped to the grid.
struct Cloud {
  Cell center;
  int diameter = 1;
  std::vector<Cell> support;

  [[nodiscard]] bool covers(Cell c) const {
    const int dx = c.x - center.x;
    const int dy = c.y - center.y;
    // dist <= d/2  <=>  4*dist^2 <= d^2, exact in integers
    return 4 * (dx * dx + dy * dy) <= diameter * diameter;
  }
  [[nodiscard]] double intensity_at(Cell c) const;
};

/// Builds a cloud centred at `center`. Support cells outside the grid are dropped.
[[nodiscard]] Cloud make_cloud(int grid_length, Cell center, int diameter);
[[nodiscard]] inline Cloud make_cloud(const GridConfig& config, Cell center) {
  return make_cloud(config.grid_length, center, config.pollution_diameter);
}

struct CloudField {
  std::vector<Cloud> clouds;

  [[nodiscard]] bool empty() const { return clouds.empty(); }
  [[nodiscard]] std::size_t size() const { return clouds.size(); }
};

/// Draws `count` cloud centres uniformly and independently over the grid.
[[nodiscard]] CloudField spawn_clouds(const GridConfig& config, int count, Rng& rng);

/// Uniform random cell; the draw used for every random cloud centre.
[[nodiscard]] Cell random_cell(const GridConfig& config, Rng& rng);

/// Max intensity over active clouds at `pos`; 0 outside every support.
[[nodiscard]] double sense(const CloudField& field, Cell pos);

struct MoveResult {
  Cell pos;
  bool moved = false;
};

/// One clamped primitive move.
[[nodiscard]] MoveResult move(Cell pos, Direction d, const GridConfig& config);

/// Removes every cloud whose support contains `pos` and returns how many were removed.
int collect(CloudField& field, Cell pos);

[[nodiscard]] nlohmann::json to_json(const CloudField& field);
[[nodiscard]] CloudField cloud_field_from_json(const nlohmann::json& j, int grid_length);

}  // namespace hmc_search
