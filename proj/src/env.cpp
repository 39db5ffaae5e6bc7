#include "hmc_search/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace hmc_search {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::up: return "up";
    case Direction::down: return "down";
    case Direction::left: return "left";
    case Direction::right: return "right";
  }
  return "?";
}

std::optional<Direction> parse_direction(std::string_view name) {
  for (Direction d : kDirections) {
    if (to_string(d) == name) {
      return d;
    }
  }
  return std::nullopt;
}

void GridConfig::validate() const {
  if (pollution_diameter < 1) {
    throw std::invalid_argument(fmt::format("pollution_diameter must be >= 1, got {}", pollution_diameter));
  }
  if (grid_length < pollution_diameter) {
    throw std::invalid_argument(
        fmt::format("grid_length {} is smaller than pollution_diameter {}", grid_length, pollution_diameter));
  }
  if (!contains(start)) {
    throw std::invalid_argument(fmt::format("start cell ({}, {}) outside grid", start.x, start.y));
  }
  if (max_steps < 1) {
    throw std::invalid_argument(fmt::format("max_steps must be >= 1, got {}", max_steps));
  }
}

double intensity_profile(double dist, int diameter) {
  return std::max(0.0, 1.0 - 2.0 * dist / (diameter + 1.0));
}

double Cloud::intensity_at(Cell c) const {
  if (!covers(c)) {
    return 0.0;
  }
  return intensity_profile(std::hypot(c.x - center.x, c.y - center.y), diameter);
}

Cloud make_cloud(int grid_length, Cell center, int diameter) {
  Cloud cloud{center, diameter, {}};
  const int reach = diameter / 2;
  for (int y = center.y - reach; y <= center.y + reach; ++y) {
    for (int x = center.x - reach; x <= center.x + reach; ++x) {
      const Cell c{x, y};
      if (x >= 0 && y >= 0 && x < grid_length && y < grid_length && cloud.covers(c)) {
        cloud.support.push_back(c);
      }
    }
  }
  return cloud;
}

Cell random_cell(const GridConfig& config, Rng& rng) {
  return config.cell_at(rng.below(config.cell_count()));
}

CloudField spawn_clouds(const GridConfig& config, int count, Rng& rng) {
  config.validate();
  if (count < 1) {
    throw std::invalid_argument(fmt::format("cloud count must be >= 1, got {}", count));
  }
  CloudField field;
  field.clouds.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    field.clouds.push_back(make_cloud(config, random_cell(config, rng)));
  }
  return field;
}

double sense(const CloudField& field, Cell pos) {
  double best = 0.0;
  for (const Cloud& cloud : field.clouds) {
    best = std::max(best, cloud.intensity_at(pos));
  }
  return best;
}

MoveResult move(Cell pos, Direction d, const GridConfig& config) {
  const Cell next = shifted(pos, d);
  if (!config.contains(next)) {
    return {pos, false};
  }
  return {next, true};
}

int collect(CloudField& field, Cell pos) {
  const auto removed = std::erase_if(field.clouds, [pos](const Cloud& c) { return c.covers(pos); });
  return static_cast<int>(removed);
}

nlohmann::json to_json(const CloudField& field) {
  auto out = nlohmann::json::array();
  for (const Cloud& c : field.clouds) {
    out.push_back({{"center", {c.center.x, c.center.y}}, {"diameter", c.diameter}});
  }
  return out;
}

CloudField cloud_field_from_json(const nlohmann::json& j, int grid_length) {
  if (!j.is_array()) {
    throw std::invalid_argument("cloud field must be a JSON array");
  }
  CloudField field;
  for (const auto& rec : j) {
    const auto center = rec.at("center").get<std::array<int, 2>>();
    const int diameter = rec.at("diameter").get<int>();
    if (diameter < 1 || center[0] < 0 || center[1] < 0 || center[0] >= grid_length || center[1] >= grid_length) {
      throw std::invalid_argument("cloud record out of range");
    }
    field.clouds.push_back(make_cloud(grid_length, {center[0], center[1]}, diameter));
  }
  return field;
}

}  // namespace hmc_search
