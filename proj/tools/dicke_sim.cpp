#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dicke/config.hpp"
#include "dicke/errors.hpp"
#include "dicke/scenario.hpp"

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNumericalError = 3 };

dicke::ScenarioConfig merged_config(const std::string& name, const std::string& file,
                                    const std::vector<std::string>& overrides) {
    dicke::ScenarioConfig base = file.empty() ? dicke::preset(name) : dicke::load_config(file);
    if (!name.empty()) base.scenario = name;
    dicke::Json doc = dicke::to_json(base);
    for (const auto& o : overrides) dicke::apply_override(doc, o);
    return dicke::config_from_json(doc);
}

int run(const std::string& name, const std::string& file, const std::vector<std::string>& overrides,
        const std::string& out, int jobs) {
    const dicke::ScenarioConfig cfg = merged_config(name, file, overrides);
    dicke::RunOptions opt;
    if (!out.empty()) opt.out_dir = out;
    opt.jobs = jobs;
    const dicke::ScenarioResult res = dicke::run_scenario(cfg, opt);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& c : res.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    for (const auto& f : res.files) std::cout << "wrote " << f << "\n";
    return res.passed() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lindblad simulation of cavity superradiance and phase multistability"};
    app.require_subcommand(1);

    std::string scenario, config_file, out_dir;
    std::vector<std::string> overrides;
    int jobs = 1;
    auto* run_cmd = app.add_subcommand("run", "run a scenario preset or a config file");
    run_cmd->add_option("scenario", scenario, "preset name (see list)");
    run_cmd->add_option("--config", config_file, "JSON config file used instead of the preset");
    run_cmd->add_option("--set", overrides, "override a config value, e.g. numerics.rtol=1e-9")->take_all();
    run_cmd->add_option("--out", out_dir, "output directory (overrides output.directory)");
    run_cmd->add_option("--jobs", jobs, "concurrent sweep points")->check(CLI::PositiveNumber);

    auto* list_cmd = app.add_subcommand("list", "list scenario presets");

    std::string validate_file;
    auto* validate_cmd = app.add_subcommand("validate", "check a config file and print the merged config");
    validate_cmd->add_option("config", validate_file, "JSON config file")->required();

    std::string show_name;
    auto* show_cmd = app.add_subcommand("show", "print the config of a preset");
    show_cmd->add_option("scenario", show_name, "preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*list_cmd) {
            for (const auto& p : dicke::list_scenarios())
                std::printf("%-28s %-20s %s\n", p.name.c_str(), p.kind.c_str(), p.description.c_str());
            return kOk;
        }
        if (*show_cmd) {
            std::cout << dicke::to_json(dicke::preset(show_name)).dump(2) << "\n";
            return kOk;
        }
        if (*validate_cmd) {
            const dicke::ScenarioConfig cfg = dicke::load_config(validate_file);
            dicke::validate(cfg);
            std::cout << dicke::to_json(cfg).dump(2) << "\n";
            return kOk;
        }
        if (scenario.empty() && config_file.empty()) throw dicke::ConfigError("run needs a scenario name or --config");
        return run(scenario, config_file, overrides, out_dir, jobs);
    } catch (const dicke::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const dicke::DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const dicke::DimensionError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const dicke::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::bad_alloc&) {
        std::cerr << "numerical error: out of memory\n";
        return kNumericalError;
    }
}
