#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dicke/config.hpp"

namespace dicke {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ScenarioResult {
    std::string scenario;
    Json config;   // fully merged
    Json summary;  // includes the checks
    std::vector<CheckResult> checks;
    std::vector<std::string> files;
    std::vector<std::string> warnings;

    bool passed() const;
};

struct RunOptions {
    std::optional<std::string> out_dir;  // overrides output.directory
    int jobs = 1;
    bool write_files = true;
};

/// Validates the config, runs the scenario kind and writes its outputs.
/// Engine errors propagate with the scenario name prepended.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

}  // namespace dicke
