#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sosaf {

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
std::map<std::string, std::string> read_key_values(const std::filesystem::path &path);
const std::string &require_key(const std::map<std::string, std::string> &keys,
                               const std::string &key);

void write_float32_le(const std::filesystem::path &path, std::span<const double> values);
std::vector<double> read_float32_le(const std::filesystem::path &path, std::size_t count);

} // namespace sosaf
