#include "hmc_search/io.hpp"

#include <sstream>
#include <stdexcept>

namespace hmc_search {

namespace fs = std::filesystem;

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string_view>& header)
    : path_(path), out_(path, std::ios::out | std::ios::binary | std::ios::trunc) {
  if (!out_) {
    throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  }
  out_ << fmt::format("{}\n", fmt::join(header, ","));
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) {
    throw std::runtime_error(fmt::format("write to '{}' failed", path_.string()));
  }
  out_.close();
}

void write_qtable_csv(const fs::path& path, const QTable& q) {
  CsvWriter csv(path, {"x", "y", "direction", "value"});
  const int n = q.grid_length();
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      for (Direction d : kDirections) {
        csv.row(x, y, to_string(d), q({x, y}, d));
      }
    }
  }
  csv.close();
}

QTable read_qtable_csv(const fs::path& path, int grid_length) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open Q-table '{}'", path.string()));
  }
  QTable q(grid_length);
  Eigen::Array<bool, Eigen::Dynamic, 4, Eigen::RowMajor> seen =
      Eigen::Array<bool, Eigen::Dynamic, 4, Eigen::RowMajor>::Constant(grid_length * grid_length, 4, false);

  std::string line;
  std::getline(in, line);
  if (line != "x,y,direction,value") {
    throw std::invalid_argument(fmt::format("'{}' is not a Q-table CSV", path.string()));
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string x, y, dir, value;
    if (!std::getline(fields, x, ',') || !std::getline(fields, y, ',') || !std::getline(fields, dir, ',') ||
        !std::getline(fields, value)) {
      throw std::invalid_argument(fmt::format("{}:{}: expected 4 fields", path.string(), line_no));
    }
    Cell c;
    double v = 0.0;
    try {
      c = {std::stoi(x), std::stoi(y)};
      v = std::stod(value);
    } catch (const std::exception&) {
      throw std::invalid_argument(fmt::format("{}:{}: malformed number", path.string(), line_no));
    }
    if (c.x < 0 || c.y < 0 || c.x >= grid_length || c.y >= grid_length) {
      throw std::invalid_argument(fmt::format("{}:{}: cell outside a {}-grid", path.string(), line_no, grid_length));
    }
    const auto d = parse_direction(dir);
    if (!d) {
      throw std::invalid_argument(fmt::format("{}:{}: unknown direction '{}'", path.string(), line_no, dir));
    }
    q(c, *d) = v;
    seen(q.row_index(c), index_of(*d)) = true;
  }
  if (!seen.all()) {
    throw std::invalid_argument(fmt::format("'{}' does not cover every cell and direction", path.string()));
  }
  return q;
}

namespace {

template <typename Grid>
void write_grid(const fs::path& path, const Grid& grid, std::string_view column) {
  CsvWriter csv(path, {"x", "y", column});
  for (Eigen::Index y = 0; y < grid.rows(); ++y) {
    for (Eigen::Index x = 0; x < grid.cols(); ++x) {
      csv.row(x, y, grid(y, x));
    }
  }
  csv.close();
}

}  // namespace

void write_grid_csv(const fs::path& path, const Eigen::ArrayXXi& grid, std::string_view column) {
  write_grid(path, grid, column);
}

void write_grid_csv(const fs::path& path, const Eigen::ArrayXXd& grid, std::string_view column) {
  write_grid(path, grid, column);
}

void write_path_csv(const fs::path& path, const PatternPath& pattern) {
  CsvWriter csv(path, {"index", "x", "y"});
  for (std::size_t i = 0; i < pattern.cells.size(); ++i) {
    csv.row(i, pattern.cells[i].x, pattern.cells[i].y);
  }
  csv.close();
}

void write_steps_csv(const fs::path& path, const std::vector<int>& steps) {
  CsvWriter csv(path, {"episode", "steps"});
  for (std::size_t i = 0; i < steps.size(); ++i) {
    csv.row(i, steps[i]);
  }
  csv.close();
}

void write_duels_csv(const fs::path& path, const DuelReport& report) {
  CsvWriter csv(path, {"round", "x", "y", "agent", "snake", "spiral", "vs_snake", "vs_spiral"});
  for (std::size_t i = 0; i < report.rounds.size(); ++i) {
    const DuelRecord& r = report.rounds[i];
    csv.row(i, r.center.x, r.center.y, r.agent, r.snake, r.spiral, static_cast<int>(duel(r.agent, r.snake)),
            static_cast<int>(duel(r.agent, r.spiral)));
  }
  csv.close();
}

void write_histogram_csv(const fs::path& path, const Histogram& h) {
  CsvWriter csv(path, {"bin", "count"});
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    csv.row(h.lo + h.width * static_cast<double>(i), h.counts[i]);
  }
  csv.close();
}

void write_scoremap_csv(const fs::path& path, const ScoreMap& map) {
  CsvWriter csv(path, {"x", "y", "agent_steps", "opponent_steps", "outcome"});
  for (Eigen::Index y = 0; y < map.outcome.rows(); ++y) {
    for (Eigen::Index x = 0; x < map.outcome.cols(); ++x) {
      csv.row(x, y, map.agent_steps(y, x), map.opponent_steps(y, x), map.outcome(y, x));
    }
  }
  csv.close();
}

void write_population_csv(const fs::path& path, const PopulationReport& report) {
  CsvWriter csv(path, {"seed", "mean_steps", "median_steps", "failures", "wins", "ties", "losses", "win_percent"});
  for (const AgentSummary& a : report.agents) {
    csv.row(a.seed, a.eval.mean, a.eval.median, a.eval.failures, a.vs_snake.wins, a.vs_snake.ties,
            a.vs_snake.losses, a.win_percent());
  }
  csv.close();
}

void write_sweep_csv(const fs::path& path, const SweepResult& sweep) {
  CsvWriter csv(path, {"value", "mean", "ci_half_width", "ci_low", "ci_high", "win_rate"});
  for (const SweepPoint& p : sweep.points) {
    csv.row(p.value, p.steps.mean, p.steps.half_width, p.steps.mean - p.steps.half_width,
            p.steps.mean + p.steps.half_width, p.mean_win_rate);
  }
  csv.close();
}

void write_train_log_csv(const fs::path& path, const std::vector<EpisodeRecord>& episodes) {
  CsvWriter csv(path, {"episode", "epsilon", "n_step", "n_poll", "reward"});
  for (const EpisodeRecord& e : episodes) {
    csv.row(e.episode, e.epsilon, e.n_step, e.n_poll, e.reward);
  }
  csv.close();
}

void write_json_atomic(const fs::path& path, const nlohmann::json& j) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) {
      throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
    }
  }
  fs::rename(tmp, path);
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace hmc_search
