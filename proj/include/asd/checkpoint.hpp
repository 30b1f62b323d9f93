#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "asd/neural.hpp"

namespace asd {

inline constexpr int kCheckpointFormat = 1;

nlohmann::json config_to_json(const ModelConfig& c);
ModelConfig config_from_json(const nlohmann::json& j);

/// {"format_version", "arch", "task", "config", <tensor name>: {"shape", "values"}...}
nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

}  // namespace asd
