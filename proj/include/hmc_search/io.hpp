#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <Eigen/Core>
#include <fmt/format.h>
#include <json.hpp>

#include "hmc_search/baselines.hpp"
#include "hmc_search/evalharness.hpp"
#include "hmc_search/sweep.hpp"
#include "hmc_search/training.hpp"

namespace hmc_search {

/// 6 significant digits, shortest form ("%.6g").
[[nodiscard]] inline std::string format_real(double v) { return fmt::format("{:.6g}", v); }

/// Row-at-a-time CSV file. Always '\n' line endings; doubles go through format_real.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string_view>& header);

  template <typename... Fields>
  void row(const Fields&... fields) {
    static_assert(sizeof...(Fields) > 0);
    std::string line;
    bool first = true;
    ((append(line, fields, first)), ...);
    line.push_back('\n');
    out_ << line;
  }

  /// Flushes and throws if anything failed.
  void close();

 private:
  template <typename T>
  static void append(std::string& line, const T& v, bool& first) {
    if (!first) line.push_back(',');
    first = false;
    if constexpr (std::is_floating_point_v<T>) {
      line += format_real(v);
    } else {
      line += fmt::format("{}", v);
    }
  }

  std::filesystem::path path_;
  std::ofstream out_;
};

/// x,y,direction,value with rows ordered y, x, direction.
void write_qtable_csv(const std::filesystem::path& path, const QTable& q);
/// Inverse of write_qtable_csv (values carry the 6-digit rounding). Every cell and direction must be present.
[[nodiscard]] QTable read_qtable_csv(const std::filesystem::path& path, int grid_length);

/// x,y,<column> for a (y, x) laid out grid.
void write_grid_csv(const std::filesystem::path& path, const Eigen::ArrayXXi& grid, std::string_view column);
void write_grid_csv(const std::filesystem::path& path, const Eigen::ArrayXXd& grid, std::string_view column);

void write_path_csv(const std::filesystem::path& path, const PatternPath& pattern);
void write_steps_csv(const std::filesystem::path& path, const std::vector<int>& steps);
void write_duels_csv(const std::filesystem::path& path, const DuelReport& report);
void write_histogram_csv(const std::filesystem::path& path, const Histogram& h);
void write_scoremap_csv(const std::filesystem::path& path, const ScoreMap& map);
void write_population_csv(const std::filesystem::path& path, const PopulationReport& report);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep);
void write_train_log_csv(const std::filesystem::path& path, const std::vector<EpisodeRecord>& episodes);

/// Writes pretty JSON to a temporary sibling and renames it into place.
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);
[[nodiscard]] nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace hmc_search
