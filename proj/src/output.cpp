#include "dicke/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResourceError("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string config_header(const Json& config) {
    std::istringstream in(config.dump(2));
    std::string line, out;
    while (std::getline(in, line)) out += "# " + line + "\n";
    return out;
}

void write_csv(const std::filesystem::path& path, const Json& config, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_for_write(path);
    out << config_header(config);
    for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != columns.size()) throw DimensionError("write_csv: row width differs from header");
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
        out << "\n";
    }
    if (!out) throw ResourceError("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out = open_for_write(path);
    out << doc.dump(2) << "\n";
    if (!out) throw ResourceError("write failed for " + path.string());
}

}  // namespace dicke
