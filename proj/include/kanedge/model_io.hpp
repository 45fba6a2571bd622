#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "kanedge/kan.hpp"

namespace kanedge {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const KanNetwork& net);
// Throws ConfigError on a malformed or unsupported document.
KanNetwork model_from_json(const nlohmann::json& doc);

void save_model(const KanNetwork& net, const std::filesystem::path& path);
KanNetwork load_model(const std::filesystem::path& path);

}  // namespace kanedge
