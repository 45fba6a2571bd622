#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

namespace kanedge {

// Parses a JSON file; ConfigError on I/O or syntax errors.
nlohmann::json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

// 64-bit FNV-1a, used for content hashes in run manifests.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t v);

}  // namespace kanedge
