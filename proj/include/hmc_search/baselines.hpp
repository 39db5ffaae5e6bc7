#pragma once

#include <string_view>
#include <vector>

#include "hmc_search/env.hpp"

namespace hmc_search {

enum class PatternKind { snake, spiral };

[[nodiscard]] std::string_view to_string(PatternKind kind);

/// Fixed search route starting at (0, 0); consecutive cells are 4-adjacent.
struct PatternPath {
  PatternKind kind = PatternKind::snake;
  std::vector<Cell> cells;

  [[nodiscard]] int moves() const { return static_cast<int>(cells.size()) - 1; }
};

/// Full-width serpentine sweeps on rows 0, d, 2d, ..., the last row clamped to the grid.
[[nodiscard]] PatternPath snake_path(int grid_length, int diameter);

/// Ring separation used by the spiral: the widest gap, at most one diameter, that
/// leaves no cloud-sized hole at the ring corners.
[[nodiscard]] int spiral_ring_spacing(int diameter);

/// Clockwise rectangular rings from the border inward, `spiral_ring_spacing` apart.
[[nodiscard]] PatternPath spiral_path(int grid_length, int diameter);

[[nodiscard]] PatternPath make_pattern(PatternKind kind, int grid_length, int diameter);

/// Moves until the first path cell inside the cloud; `max_steps` if the path never enters it.
[[nodiscard]] int steps_to_find(const PatternPath& path, const Cloud& cloud, int max_steps);

}  // namespace hmc_search
