#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dicke/config.hpp"

namespace dicke {

/// 12 significant digits, "nan"/"inf" spelled out.
std::string format_number(double value);

/// The merged config as "# "-prefixed lines.
std::string config_header(const Json& config);

/// CSV with the config header block, one header row and numeric rows.
void write_csv(const std::filesystem::path& path, const Json& config, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

/// Pretty-printed JSON, newline terminated.
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace dicke
