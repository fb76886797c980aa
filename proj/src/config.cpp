#include "dicke/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::set<std::string> kKinds{"superradiance", "kappa-sweep", "three-level-compare",
                                   "bistability-q", "peak-sweep",   "driven-q"};

/// Reads the members of one JSON object and rejects the ones nobody asked for.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(where() + "." + key + " has the wrong type");
        }
    }

    const Json* child(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("unknown key " + where() + "." + it.key());
    }

    std::string where() const { return path_.empty() ? "<root>" : path_; }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<double> per_qubit(const std::vector<double>& v, int n, const char* name, bool empty_is_zero) {
    if (v.empty()) {
        if (empty_is_zero) return std::vector<double>(static_cast<std::size_t>(n), 0.0);
        throw ConfigError(std::string("spec.") + name + " is required");
    }
    if (v.size() == 1) return std::vector<double>(static_cast<std::size_t>(n), v.front());
    if (v.size() != static_cast<std::size_t>(n))
        throw ConfigError(std::string("spec.") + name + " needs 1 or n_qubits entries");
    return v;
}

std::vector<double> scaled(std::vector<double> v) {
    for (double& x : v) x *= kTwoPi;
    return v;
}

}  // namespace

Json to_json(const ScenarioConfig& c) {
    Json spec{{"n_qubits", c.spec.n_qubits},
              {"g_mhz", c.spec.g_mhz},
              {"delta_r_mhz", c.spec.delta_r_mhz},
              {"delta_q_mhz", c.spec.delta_q_mhz},
              {"kappa_mhz", c.spec.kappa_mhz},
              {"gamma_s_mhz", c.spec.gamma_s_mhz},
              {"gamma_p_mhz", c.spec.gamma_p_mhz},
              {"drive_mhz", c.spec.drive_mhz},
              {"n_max", c.spec.n_max},
              {"three_level", c.spec.three_level},
              {"anharmonicity_mhz", c.spec.anharmonicity_mhz},
              {"upper_coupling_mhz", c.spec.upper_coupling_mhz},
              {"upper_relaxation_factor", c.spec.upper_relaxation_factor}};
    const auto& n = c.numerics;
    Json numerics{{"integrator", n.integrator},
                  {"rtol", n.rtol},
                  {"atol", n.atol},
                  {"tau_end", n.tau_end},
                  {"tau_step", n.tau_step},
                  {"auto_truncation", n.auto_truncation},
                  {"truncation_cap", n.truncation_cap},
                  {"frame", n.frame},
                  {"grid_spacing", n.grid_spacing},
                  {"grid_margin", n.grid_margin},
                  {"min_prominence", n.min_prominence},
                  {"quadrature_order", n.quadrature_order},
                  {"kappa_ratios", n.kappa_ratios},
                  {"drives_mhz", n.drives_mhz},
                  {"allow_large", n.allow_large},
                  {"max_superoperator_dim", n.max_superoperator_dim}};
    Json output{{"directory", c.output.directory}, {"formats", c.output.formats}};
    return Json{{"scenario", c.scenario},
                {"kind", c.kind},
                {"description", c.description},
                {"spec", spec},
                {"numerics", numerics},
                {"output", output}};
}

ScenarioConfig config_from_json(const Json& j) {
    ScenarioConfig c;
    ObjectReader root(j, "");
    root.get("scenario", c.scenario);
    root.get("kind", c.kind);
    root.get("description", c.description);
    if (const Json* s = root.child("spec")) {
        ObjectReader r(*s, "spec");
        auto& p = c.spec;
        r.get("n_qubits", p.n_qubits);
        r.get("g_mhz", p.g_mhz);
        r.get("delta_r_mhz", p.delta_r_mhz);
        r.get("delta_q_mhz", p.delta_q_mhz);
        r.get("kappa_mhz", p.kappa_mhz);
        r.get("gamma_s_mhz", p.gamma_s_mhz);
        r.get("gamma_p_mhz", p.gamma_p_mhz);
        r.get("drive_mhz", p.drive_mhz);
        r.get("n_max", p.n_max);
        r.get("three_level", p.three_level);
        r.get("anharmonicity_mhz", p.anharmonicity_mhz);
        r.get("upper_coupling_mhz", p.upper_coupling_mhz);
        r.get("upper_relaxation_factor", p.upper_relaxation_factor);
        r.finish();
    }
    if (const Json* s = root.child("numerics")) {
        ObjectReader r(*s, "numerics");
        auto& n = c.numerics;
        r.get("integrator", n.integrator);
        r.get("rtol", n.rtol);
        r.get("atol", n.atol);
        r.get("tau_end", n.tau_end);
        r.get("tau_step", n.tau_step);
        r.get("auto_truncation", n.auto_truncation);
        r.get("truncation_cap", n.truncation_cap);
        r.get("frame", n.frame);
        r.get("grid_spacing", n.grid_spacing);
        r.get("grid_margin", n.grid_margin);
        r.get("min_prominence", n.min_prominence);
        r.get("quadrature_order", n.quadrature_order);
        r.get("kappa_ratios", n.kappa_ratios);
        r.get("drives_mhz", n.drives_mhz);
        r.get("allow_large", n.allow_large);
        r.get("max_superoperator_dim", n.max_superoperator_dim);
        r.finish();
    }
    if (const Json* s = root.child("output")) {
        ObjectReader r(*s, "output");
        r.get("directory", c.output.directory);
        r.get("formats", c.output.formats);
        r.finish();
    }
    root.finish();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    Json j;
    try {
        j = Json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

void apply_override(Json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        value = text;
    }
    Json* node = &doc;
    std::stringstream path(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(path, part, '.')) parts.push_back(part);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (!node->is_object() || !node->contains(parts[k])) throw ConfigError("unknown config key '" + key + "'");
        node = &(*node)[parts[k]];
    }
    *node = value;
}

void validate(const ScenarioConfig& c) {
    if (!kKinds.count(c.kind)) throw ConfigError("unknown scenario kind '" + c.kind + "'");
    const auto& n = c.numerics;
    if (n.integrator != "runge-kutta" && n.integrator != "krylov")
        throw ConfigError("numerics.integrator must be runge-kutta or krylov");
    if (n.frame != "auto" && n.frame != "lab") throw ConfigError("numerics.frame must be auto or lab");
    if (!(n.rtol > 0.0) || !(n.atol > 0.0)) throw ConfigError("numerics.rtol and atol must be positive");
    if (!(n.tau_end > 0.0) || !(n.tau_step > 0.0) || n.tau_step > n.tau_end)
        throw ConfigError("numerics.tau_end and tau_step must be positive with tau_step <= tau_end");
    if (n.truncation_cap < 2) throw ConfigError("numerics.truncation_cap must be >= 2");
    if (!(n.grid_spacing > 0.0) || !(n.grid_margin >= 0.0))
        throw ConfigError("numerics.grid_spacing must be positive and grid_margin nonnegative");
    if (!(n.min_prominence >= 0.0 && n.min_prominence < 1.0))
        throw ConfigError("numerics.min_prominence must lie in [0, 1)");
    if (n.quadrature_order < 0) throw ConfigError("numerics.quadrature_order must be >= 0");
    for (double r : n.kappa_ratios)
        if (!(r > 0.0)) throw ConfigError("numerics.kappa_ratios must be positive");
    for (double e : n.drives_mhz)
        if (!(e > 0.0)) throw ConfigError("numerics.drives_mhz must be positive");
    if (n.max_superoperator_dim < 4) throw ConfigError("numerics.max_superoperator_dim is too small");
    for (const auto& f : c.output.formats)
        if (f != "csv" && f != "json") throw ConfigError("output.formats entries must be csv or json");
    if (c.kind == "kappa-sweep" && n.kappa_ratios.empty())
        throw ConfigError("kappa-sweep needs numerics.kappa_ratios");
    if (c.kind == "peak-sweep" && n.drives_mhz.empty()) throw ConfigError("peak-sweep needs numerics.drives_mhz");
    const SystemSpec spec = to_system_spec(c.spec);
    spec.validate();
}

SystemSpec to_system_spec(const SpecConfig& p) {
    if (p.n_qubits < 1) throw ConfigError("spec.n_qubits must be >= 1");
    SystemSpec s;
    s.n_qubits = p.n_qubits;
    s.g = scaled(per_qubit(p.g_mhz, p.n_qubits, "g_mhz", false));
    s.delta_r = kTwoPi * p.delta_r_mhz;
    s.delta_q = scaled(per_qubit(p.delta_q_mhz, p.n_qubits, "delta_q_mhz", true));
    s.kappa = kTwoPi * p.kappa_mhz;
    s.gamma_s = scaled(per_qubit(p.gamma_s_mhz, p.n_qubits, "gamma_s_mhz", true));
    s.gamma_p = scaled(per_qubit(p.gamma_p_mhz, p.n_qubits, "gamma_p_mhz", true));
    s.drive = kTwoPi * p.drive_mhz;
    s.n_max = p.n_max;
    if (p.three_level) {
        ThreeLevelParams t;
        t.anharmonicity = kTwoPi * p.anharmonicity_mhz;
        if (!p.upper_coupling_mhz.empty())
            t.upper_coupling = scaled(per_qubit(p.upper_coupling_mhz, p.n_qubits, "upper_coupling_mhz", false));
        t.upper_relaxation_factor = p.upper_relaxation_factor;
        s.three_level = t;
    }
    return s;
}

namespace {

struct PresetEntry {
    PresetInfo info;
    ScenarioConfig (*make)();
};

ScenarioConfig base(const char* name, const char* kind, const char* description) {
    ScenarioConfig c;
    c.scenario = name;
    c.kind = kind;
    c.description = description;
    return c;
}

ScenarioConfig superradiance(const char* name, std::vector<double> g, Index n_max, const char* description) {
    ScenarioConfig c = base(name, "superradiance", description);
    c.spec.n_qubits = static_cast<int>(g.size());
    c.spec.g_mhz = std::move(g);
    c.spec.kappa_mhz = 2000.0;
    c.spec.gamma_s_mhz = {0.19};
    c.spec.n_max = n_max;
    return c;
}

const std::vector<double> kG3{83.7, 85.7, 85.1};
const std::vector<double> kG4{69.4, 69.1, 68.6, 69.7};
const std::vector<double> kG5{59.0, 59.4, 59.9, 60.9, 60.7};

ScenarioConfig bistable(const char* name, const char* kind, double g, double kappa, double gamma_s, double drive,
                        const char* description) {
    ScenarioConfig c = base(name, kind, description);
    c.spec.n_qubits = 1;
    c.spec.g_mhz = {g};
    c.spec.kappa_mhz = kappa;
    c.spec.gamma_s_mhz = {gamma_s};
    c.spec.drive_mhz = drive;
    c.spec.n_max = 40;
    return c;
}

ScenarioConfig multistable(const char* name, std::vector<double> g, double drive, Index cap, const char* description) {
    ScenarioConfig c = base(name, "driven-q", description);
    c.spec.n_qubits = 3;
    c.spec.g_mhz = std::move(g);
    c.spec.kappa_mhz = 42.4;
    c.spec.gamma_s_mhz = {0.19};
    c.spec.drive_mhz = drive;
    c.spec.n_max = cap;
    c.numerics.truncation_cap = cap;
    return c;
}

const std::vector<PresetEntry>& presets() {
    static const std::vector<PresetEntry> table{
        {{"superradiance-n3", "superradiance", "N=3 burst, full ME vs ladder ODE vs closed form"},
         [] { return superradiance("superradiance-n3", kG3, 8, "N=3 burst, full ME vs ladder ODE vs closed form"); }},
        {{"superradiance-n4", "superradiance", "N=4 burst, full ME vs ladder ODE vs closed form"},
         [] { return superradiance("superradiance-n4", kG4, 6, "N=4 burst, full ME vs ladder ODE vs closed form"); }},
        {{"superradiance-n5", "superradiance", "N=5 burst, full ME vs ladder ODE vs closed form"},
         [] { return superradiance("superradiance-n5", kG5, 6, "N=5 burst, full ME vs ladder ODE vs closed form"); }},
        {{"superradiance-kappa-sweep", "kappa-sweep", "N=3 full-ME peak error vs kappa/gbar"},
         [] {
             ScenarioConfig c = superradiance("superradiance-kappa-sweep", kG3, 8, "N=3 full-ME peak error vs kappa/gbar");
             c.kind = "kappa-sweep";
             c.numerics.kappa_ratios = {10.0, 20.0, 40.0};
             return c;
         }},
        {{"three-level-compare", "three-level-compare", "N=3 two-level vs qutrit transmons, alpha_r = 660 MHz"},
         [] {
             ScenarioConfig c = superradiance("three-level-compare", kG3, 5,
                                              "N=3 two-level vs qutrit transmons, alpha_r = 660 MHz");
             c.kind = "three-level-compare";
             c.spec.three_level = true;
             c.spec.anharmonicity_mhz = 660.0;
             c.numerics.tau_step = 0.002;
             return c;
         }},
        {{"bistability-q", "bistability-q", "analytic single-qubit Q, (g, kappa, gamma_s) = (85, 4, 0.19) MHz"},
         [] {
             ScenarioConfig c = bistable("bistability-q", "bistability-q", 85.0, 4.0, 0.19, 100.0,
                                         "analytic single-qubit Q, (g, kappa, gamma_s) = (85, 4, 0.19) MHz");
             c.numerics.grid_spacing = 0.05;
             return c;
         }},
        {{"bistability-peak-sweep", "peak-sweep", "numeric vs analytic peaks, E = 45..117.6 MHz, kappa = 28.3 MHz"},
         [] {
             ScenarioConfig c = bistable("bistability-peak-sweep", "peak-sweep", 85.0, 28.3, 0.19, 117.6,
                                         "numeric vs analytic peaks, E = 45..117.6 MHz, kappa = 28.3 MHz");
             c.numerics.drives_mhz = {45.0, 57.1, 69.2, 81.3, 93.4, 105.5, 117.6};
             return c;
         }},
        {{"bistability-n1-dense", "driven-q", "N=1 steady state at g/kappa = 2, E/kappa = 4, truncation 40"},
         [] {
             ScenarioConfig c = bistable("bistability-n1-dense", "driven-q", 20.0, 10.0, 0.5, 40.0,
                                         "N=1 steady state at g/kappa = 2, E/kappa = 4, truncation 40");
             c.numerics.auto_truncation = false;
             return c;
         }},
        {{"multistability-n3-scaled", "driven-q", "N=3 at E/kappa = 2, gbar/kappa = 1, truncation 40"},
         [] {
             ScenarioConfig c = multistable("multistability-n3-scaled", {42.4}, 84.8, 40,
                                            "N=3 at E/kappa = 2, gbar/kappa = 1, truncation 40");
             c.numerics.auto_truncation = false;
             return c;
         }},
        {{"multistability-n3-uniform", "driven-q", "N=3, kappa = 42.4 MHz, E = 169.6 MHz, uniform gbar"},
         [] {
             return multistable("multistability-n3-uniform", {(83.7 + 85.7 + 85.1) / 3.0}, 169.6, 45,
                                "N=3, kappa = 42.4 MHz, E = 169.6 MHz, uniform gbar");
         }},
        {{"multistability-n3-full", "driven-q", "N=3 with per-qubit couplings; needs numerics.allow_large"},
         [] { return multistable("multistability-n3-full", kG3, 169.6, 45,
                                 "N=3 with per-qubit couplings; needs numerics.allow_large"); }},
        {{"custom", "superradiance", "template for config-driven runs (edit kind, spec and numerics)"},
         [] {
             ScenarioConfig c = superradiance("custom", {80.0, 80.0, 80.0}, 6,
                                              "template for config-driven runs (edit kind, spec and numerics)");
             return c;
         }},
    };
    return table;
}

}  // namespace

std::vector<PresetInfo> list_scenarios() {
    std::vector<PresetInfo> out;
    for (const auto& p : presets()) out.push_back(p.info);
    return out;
}

ScenarioConfig preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.info.name == name) return p.make();
    throw ConfigError("unknown scenario '" + name + "' (see dicke-sim list)");
}

}  // namespace dicke
