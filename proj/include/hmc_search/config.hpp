#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hmc_search/training.hpp"

namespace hmc_search {

/// Pointer to one named Hyperparams field.
using FieldRef = std::variant<int*, double*, bool*>;

/// Config keys in canonical output order.
[[nodiscard]] const std::vector<std::string>& config_keys();

[[nodiscard]] std::optional<FieldRef> field_ref(Hyperparams& hp, std::string_view key);

/// Strict parse: missing keys keep defaults, unknown keys and type mismatches throw
/// std::invalid_argument. The result is validated.
[[nodiscard]] Hyperparams hyperparams_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const Hyperparams& hp);

/// Reads a JSON config file.
[[nodiscard]] Hyperparams parse_config(const std::filesystem::path& path);

}  // namespace hmc_search
