#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicke/model.hpp"

namespace dicke {

using Json = nlohmann::ordered_json;

/// Physical parameters as quoted in MHz (frequency / 2 pi).
struct SpecConfig {
    int n_qubits = 1;
    std::vector<double> g_mhz;
    double delta_r_mhz = 0.0;
    std::vector<double> delta_q_mhz;  // empty means all zero
    double kappa_mhz = 0.0;
    std::vector<double> gamma_s_mhz;  // one entry is broadcast to every qubit
    std::vector<double> gamma_p_mhz;  // empty means all zero
    double drive_mhz = 0.0;
    Index n_max = 2;
    bool three_level = false;
    double anharmonicity_mhz = 0.0;
    std::vector<double> upper_coupling_mhz;  // empty means sqrt(2) g
    double upper_relaxation_factor = 2.0;
};

struct NumericsConfig {
    std::string integrator = "runge-kutta";  // or "krylov"
    double rtol = 1e-8;
    double atol = 1e-10;
    double tau_end = 3.0;
    double tau_step = 0.005;
    bool auto_truncation = true;
    Index truncation_cap = 40;
    std::string frame = "auto";  // "auto" (displaced to the predicted centre) or "lab"
    double grid_spacing = 0.1;
    double grid_margin = 3.0;
    double min_prominence = 0.02;
    int quadrature_order = 0;    // 0 picks the order automatically
    std::vector<double> kappa_ratios;  // kappa / gbar values for convergence sweeps
    std::vector<double> drives_mhz;    // drive values for peak sweeps
    bool allow_large = false;          // lift the desk-scale size guard
    Index max_superoperator_dim = 2'000'000;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
};

struct ScenarioConfig {
    std::string scenario = "custom";
    /// One of: superradiance, kappa-sweep, three-level-compare, bistability-q,
    /// peak-sweep, driven-q.
    std::string kind;
    std::string description;
    SpecConfig spec;
    NumericsConfig numerics;
    OutputConfig output;
};

Json to_json(const ScenarioConfig& cfg);
/// Strict: unknown keys and wrong types throw ConfigError.
ScenarioConfig config_from_json(const Json& j);
ScenarioConfig load_config(const std::string& path);

/// Applies "a.b.c=value" to the document. The value is parsed as JSON when
/// possible and taken as a string otherwise. Unknown paths throw ConfigError.
void apply_override(Json& doc, const std::string& assignment);

/// Range and consistency checks beyond parsing; throws ConfigError.
void validate(const ScenarioConfig& cfg);

/// Angular-rate SystemSpec (rates times 2 pi).
SystemSpec to_system_spec(const SpecConfig& spec);

struct PresetInfo {
    std::string name;
    std::string kind;
    std::string description;
};

std::vector<PresetInfo> list_scenarios();
/// Throws ConfigError for unknown names.
ScenarioConfig preset(const std::string& name);

}  // namespace dicke
