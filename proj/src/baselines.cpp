#include "hmc_search/baselines.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace hmc_search {

namespace {

void check_geometry(int grid_length, int diameter) {
  if (diameter < 1 || grid_length < diameter) {
    throw std::invalid_argument(
        fmt::format("pattern needs 1 <= diameter <= grid_length, got diameter {} grid {}", diameter, grid_length));
  }
}

// Appends the straight run from the path's last cell to `target` (same row or column).
void walk_to(std::vector<Cell>& cells, Cell target) {
  Cell pos = cells.back();
  while (pos != target) {
    if (pos.x != target.x) {
      pos.x += pos.x < target.x ? 1 : -1;
    } else {
      pos.y += pos.y < target.y ? 1 : -1;
    }
    cells.push_back(pos);
  }
}

}  // namespace

std::string_view to_string(PatternKind kind) {
  return kind == PatternKind::snake ? "snake" : "spiral";
}

PatternPath snake_path(int grid_length, int diameter) {
  check_geometry(grid_length, diameter);
  const int reach = diameter / 2;
  const int last = grid_length - 1;

  // Sweeps start on the start row; the last one must reach within `reach` of the bottom edge.
  std::vector<int> rows{0};
  while (rows.back() < last - reach) {
    rows.push_back(std::min(rows.back() + diameter, last));
  }

  PatternPath path{PatternKind::snake, {Cell{0, 0}}};
  bool rightward = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    walk_to(path.cells, {rightward ? last : 0, rows[i]});
    if (i + 1 < rows.size()) {
      walk_to(path.cells, {path.cells.back().x, rows[i + 1]});
    }
    rightward = !rightward;
  }
  return path;
}

int spiral_ring_spacing(int diameter) {
  const int d2 = diameter * diameter;
  // Widest separation for which every cell in the square between an inner ring
  // corner and the two outer ring sides lies within diameter/2 of one of them.
  for (int spacing = diameter; spacing > 1; --spacing) {
    bool covered = true;
    for (int i = 0; i <= spacing && covered; ++i) {
      for (int j = 0; j <= spacing && covered; ++j) {
        const int to_outer = std::min(spacing - i, spacing - j);
        const int nearest_sq = std::min(i * i + j * j, to_outer * to_outer);
        covered = 4 * nearest_sq <= d2;
      }
    }
    if (covered) {
      return spacing;
    }
  }
  return 1;
}

PatternPath spiral_path(int grid_length, int diameter) {
  check_geometry(grid_length, diameter);
  const int reach = diameter / 2;
  const int last = grid_length - 1;
  const int spacing = spiral_ring_spacing(diameter);

  PatternPath path{PatternKind::spiral, {Cell{0, 0}}};
  int inset = 0;
  while (true) {
    const int lo = inset;
    const int hi = last - inset;

    int next = inset + spacing;
    if (next > last - next) {
      // No full ring fits one spacing further in. If the centre of this ring is
      // still out of reach, close with the innermost ring.
      next = (hi - lo > 2 * reach + 1) ? last / 2 : -1;
    }

    walk_to(path.cells, {hi, lo});
    walk_to(path.cells, {hi, hi});
    walk_to(path.cells, {lo, hi});
    if (next < 0) {
      walk_to(path.cells, {lo, std::min(lo + 1, hi)});
      break;
    }
    walk_to(path.cells, {lo, next});
    walk_to(path.cells, {next, next});
    inset = next;
  }
  return path;
}

PatternPath make_pattern(PatternKind kind, int grid_length, int diameter) {
  return kind == PatternKind::snake ? snake_path(grid_length, diameter) : spiral_path(grid_length, diameter);
}

int steps_to_find(const PatternPath& path, const Cloud& cloud, int max_steps) {
  for (std::size_t i = 0; i < path.cells.size(); ++i) {
    if (cloud.covers(path.cells[i])) {
      return static_cast<int>(i);
    }
  }
  return max_steps;
}

}  // namespace hmc_search
