#include "hmc_search/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace hmc_search {

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "grid_length",   "pollution_diameter", "max_steps",        "num_episodes",   "learning_rate",
      "discount_rate", "epsilon_start",      "epsilon_final",    "epsilon_decay",  "best_learn_value",
      "num_clouds",    "mof_value",          "stop_learn_value", "option_length",  "reward_scaling",
      "binary_memory", "normalize_epsilon_decay", "sense_each_step",
  };
  return keys;
}

std::optional<FieldRef> field_ref(Hyperparams& hp, std::string_view key) {
  if (key == "grid_length") return &hp.grid.grid_length;
  if (key == "pollution_diameter") return &hp.grid.pollution_diameter;
  if (key == "max_steps") return &hp.grid.max_steps;
  if (key == "num_episodes") return &hp.num_episodes;
  if (key == "learning_rate") return &hp.learning_rate;
  if (key == "discount_rate") return &hp.discount_rate;
  if (key == "epsilon_start") return &hp.epsilon_start;
  if (key == "epsilon_final") return &hp.epsilon_final;
  if (key == "epsilon_decay") return &hp.epsilon_decay;
  if (key == "best_learn_value") return &hp.best_learn_value;
  if (key == "num_clouds") return &hp.num_clouds;
  if (key == "mof_value") return &hp.mof_value;
  if (key == "stop_learn_value") return &hp.stop_learn_value;
  if (key == "option_length") return &hp.option_length;
  if (key == "reward_scaling") return &hp.reward_scaling;
  if (key == "binary_memory") return &hp.binary_memory;
  if (key == "normalize_epsilon_decay") return &hp.normalize_epsilon_decay;
  if (key == "sense_each_step") return &hp.sense_each_step;
  return std::nullopt;
}

Hyperparams hyperparams_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  Hyperparams hp;
  for (const auto& [key, value] : j.items()) {
    const auto ref = field_ref(hp, key);
    if (!ref) {
      throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
    }
    std::visit(
        [&, &key = key](auto* field) {
          using T = std::remove_pointer_t<decltype(field)>;
          if constexpr (std::is_same_v<T, bool>) {
            if (!value.is_boolean()) {
              throw std::invalid_argument(fmt::format("config key '{}' must be a boolean", key));
            }
            *field = value.template get<bool>();
          } else if constexpr (std::is_same_v<T, int>) {
            if (!value.is_number_integer()) {
              throw std::invalid_argument(fmt::format("config key '{}' must be an integer", key));
            }
            *field = value.template get<int>();
          } else {
            if (!value.is_number()) {
              throw std::invalid_argument(fmt::format("config key '{}' must be a number", key));
            }
            *field = value.template get<double>();
          }
        },
        *ref);
  }
  hp.validate();
  return hp;
}

nlohmann::json to_json(const Hyperparams& hp) {
  Hyperparams copy = hp;
  auto out = nlohmann::json::object();
  for (const std::string& key : config_keys()) {
    std::visit([&](auto* field) { out[key] = *field; }, *field_ref(copy, key));
  }
  return out;
}

Hyperparams parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open config '{}'", path.string()));
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(fmt::format("malformed config '{}': {}", path.string(), e.what()));
  }
  return hyperparams_from_json(j);
}

}  // namespace hmc_search
