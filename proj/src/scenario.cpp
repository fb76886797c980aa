#include "dicke/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "dicke/errors.hpp"
#include "dicke/multistability.hpp"
#include "dicke/output.hpp"
#include "dicke/superradiance.hpp"

namespace dicke {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(double v) { return format_number(v); }

struct Context {
    const ScenarioConfig& cfg;
    const RunOptions& opt;
    ScenarioResult& res;

    std::filesystem::path file(const std::string& suffix) const {
        const std::string dir = opt.out_dir ? *opt.out_dir : cfg.output.directory;
        return std::filesystem::path(dir) / (cfg.scenario + "_" + suffix);
    }
    bool wants(const std::string& format) const {
        return opt.write_files &&
               std::find(cfg.output.formats.begin(), cfg.output.formats.end(), format) != cfg.output.formats.end();
    }
    void csv(const std::string& suffix, const std::vector<std::string>& cols,
             const std::vector<std::vector<double>>& rows) const {
        if (!wants("csv")) return;
        const auto p = file(suffix);
        write_csv(p, res.config, cols, rows);
        res.files.push_back(p.string());
    }
    void json(const std::string& suffix, Json doc) const {
        if (!wants("json")) return;
        const auto p = file(suffix);
        Json wrapped{{"config", res.config}};
        for (auto it = doc.begin(); it != doc.end(); ++it) wrapped[it.key()] = it.value();
        write_json(p, wrapped);
        res.files.push_back(p.string());
    }
    void check(const std::string& name, bool passed, const std::string& detail) const {
        res.checks.push_back({name, passed, detail});
    }
};

EvolveOptions evolve_options(const NumericsConfig& n) {
    EvolveOptions e;
    e.integrator = n.integrator == "krylov" ? Integrator::Krylov : Integrator::RungeKutta;
    e.rtol = n.rtol;
    e.atol = n.atol;
    return e;
}

Json physicality_json(const EvolutionReport& r) {
    return Json{{"max_trace_defect", r.max_trace_defect},
                {"max_hermiticity_defect", r.max_hermiticity_defect},
                {"min_eigenvalue", r.min_eigenvalue},
                {"accepted_steps", r.stats.accepted},
                {"rejected_steps", r.stats.rejected}};
}

Json rates_json(const EffectiveRates& r) {
    return Json{{"gbar_mhz", r.gbar / kTwoPi},
                {"gamma_mhz", r.gamma / kTwoPi},
                {"R1_mhz", r.R1 / kTwoPi},
                {"kappa_over_gbar", 2.0 * r.Gamma.real() / r.gbar}};
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double relative_peak_error(const SuperradianceCheck& got, const SuperradianceCheck& ref) {
    return std::abs(got.i_max - ref.i_max) / ref.i_max;
}

void run_superradiance(const Context& c) {
    const SystemSpec spec = to_system_spec(c.cfg.spec);
    const int n = spec.n_qubits;
    const auto tau = uniform_grid(c.cfg.numerics.tau_end, c.cfg.numerics.tau_step);
    FullMeOptions fo;
    fo.evolve = evolve_options(c.cfg.numerics);
    const FullMeIntensity full = full_me_intensity(spec, tau, fo);
    const DickeLadderSolution ode = dicke_ladder_evolve(n, tau);
    const bool has_analytic = n >= 3 && n <= 5;
    std::vector<double> analytic(tau.size(), std::numeric_limits<double>::quiet_NaN());
    if (has_analytic)
        for (std::size_t k = 0; k < tau.size(); ++k) analytic[k] = analytic_intensity(n, tau[k]);

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < tau.size(); ++k) rows.push_back({tau[k], full.intensity[k], ode.intensity[k], analytic[k]});
    c.csv("intensity.csv", {"tau", "I_full_me", "I_srme_ode", "I_analytic"}, rows);

    const auto peak_full = superradiance_check(tau, full.intensity, n);
    const auto peak_ode = superradiance_check(tau, ode.intensity, n);
    const double rel = relative_peak_error(peak_full, peak_ode);
    Json s{{"rates", rates_json(full.rates)},
           {"bad_cavity_warning", full.bad_cavity_warning},
           {"full_me", {{"I_max", peak_full.i_max}, {"tau_max", peak_full.tau_max}, {"superradiant", peak_full.superradiant}}},
           {"srme_ode", {{"I_max", peak_ode.i_max}, {"tau_max", peak_ode.tau_max}, {"superradiant", peak_ode.superradiant}}},
           {"relative_peak_error", rel},
           {"max_top_fock", full.max_top_fock},
           {"physicality", physicality_json(full.report)}};
    if (full.bad_cavity_warning) c.res.warnings.push_back("kappa/gbar < 10: outside the bad-cavity regime");

    c.check("full-me-superradiant", peak_full.superradiant, "I_max = " + fmt(peak_full.i_max) + " vs N = " + std::to_string(n));
    c.check("peak-agreement", rel < 0.10, "relative peak error " + fmt(rel) + " (< 0.1)");
    if (has_analytic) {
        const auto closed = dicke_ladder_closed_form(n, tau);
        const double d1 = sup_diff(ode.intensity, analytic);
        const double d2 = sup_diff(closed.intensity, analytic);
        const double d3 = sup_diff(ode.intensity, closed.intensity);
        const double worst = std::max({d1, d2, d3});
        const auto peak_an = superradiance_check(tau, analytic, n);
        s["analytic"] = {{"I_max", peak_an.i_max}, {"tau_max", peak_an.tau_max}};
        s["ladder_sup_differences"] = {{"ode_vs_analytic", d1}, {"closed_vs_analytic", d2}, {"ode_vs_closed", d3}};
        c.check("ladder-oracles", worst < 1e-6, "max pairwise sup-norm " + fmt(worst) + " (< 1e-6)");
    }
    c.res.summary = s;
}

void run_kappa_sweep(const Context& c) {
    const SystemSpec base = to_system_spec(c.cfg.spec);
    const int n = base.n_qubits;
    const auto tau = uniform_grid(c.cfg.numerics.tau_end, c.cfg.numerics.tau_step);
    const auto& ratios = c.cfg.numerics.kappa_ratios;
    const DickeLadderSolution ode = dicke_ladder_evolve(n, tau);
    const auto peak_ode = superradiance_check(tau, ode.intensity, n);

    FullMeOptions fo;
    fo.evolve = evolve_options(c.cfg.numerics);
    std::vector<FullMeIntensity> runs(ratios.size());
    std::vector<std::future<void>> pending;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < ratios.size(); k = next++) {
            SystemSpec s = base;
            s.kappa = ratios[k] * base.mean_coupling();
            runs[k] = full_me_intensity(s, tau, fo);
        }
    };
    const int threads = std::max(1, std::min<int>(c.opt.jobs, static_cast<int>(ratios.size())));
    for (int t = 0; t < threads; ++t) pending.push_back(std::async(std::launch::async, worker));
    for (auto& f : pending) f.get();

    std::vector<std::string> cols{"tau", "I_srme_ode"};
    for (double r : ratios) cols.push_back("I_full_me_kappa_over_gbar_" + fmt(r));
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < tau.size(); ++k) {
        std::vector<double> row{tau[k], ode.intensity[k]};
        for (const auto& run : runs) row.push_back(run.intensity[k]);
        rows.push_back(std::move(row));
    }
    c.csv("intensity.csv", cols, rows);

    Json points = Json::array();
    std::vector<double> errors;
    for (std::size_t k = 0; k < ratios.size(); ++k) {
        const auto pk = superradiance_check(tau, runs[k].intensity, n);
        errors.push_back(relative_peak_error(pk, peak_ode));
        points.push_back({{"kappa_over_gbar", ratios[k]},
                          {"kappa_mhz", ratios[k] * base.mean_coupling() / kTwoPi},
                          {"I_max", pk.i_max},
                          {"relative_peak_error", errors.back()},
                          {"sup_error", sup_diff(runs[k].intensity, ode.intensity)},
                          {"physicality", physicality_json(runs[k].report)}});
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < errors.size(); ++k) decreasing = decreasing && errors[k] < errors[k - 1];
    std::string detail = "relative peak errors";
    for (double e : errors) detail += " " + fmt(e);
    c.check("monotone-convergence", decreasing, detail);
    c.res.summary = Json{{"srme_I_max", peak_ode.i_max}, {"points", points}};
}

void run_three_level(const Context& c) {
    const SystemSpec three = to_system_spec(c.cfg.spec);
    if (!three.three_level) throw ConfigError("three-level-compare needs spec.three_level = true");
    SystemSpec two = three;
    two.three_level.reset();
    const int n = three.n_qubits;
    const auto tau = uniform_grid(c.cfg.numerics.tau_end, c.cfg.numerics.tau_step);
    FullMeOptions fo;
    fo.evolve = evolve_options(c.cfg.numerics);

    auto f2 = std::async(c.opt.jobs > 1 ? std::launch::async : std::launch::deferred,
                         [&] { return full_me_intensity(two, tau, fo); });
    const FullMeIntensity r3 = full_me_intensity(three, tau, fo);
    const FullMeIntensity r2 = f2.get();

    std::vector<std::vector<double>> rows;
    std::vector<double> diff(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k) {
        rows.push_back({tau[k], r2.intensity[k], r3.intensity[k], r3.upper_population[k]});
        diff[k] = r3.intensity[k] - r2.intensity[k];
    }
    c.csv("intensity.csv", {"tau", "I_two_level", "I_three_level", "P_third_level"}, rows);

    const auto p2 = superradiance_check(tau, r2.intensity, n);
    const auto p3 = superradiance_check(tau, r3.intensity, n);
    const double rel = relative_peak_error(p3, p2);
    // One period of the e-f detuning, in tau units.
    const double period = r3.rates.gamma * kTwoPi / three.three_level->anharmonicity;
    const auto window = static_cast<std::size_t>(std::max(1.0, std::round(period / c.cfg.numerics.tau_step)));
    const double hf = high_frequency_residual(diff, window);
    c.res.summary = Json{{"rates", rates_json(r3.rates)},
                         {"two_level_I_max", p2.i_max},
                         {"three_level_I_max", p3.i_max},
                         {"relative_peak_difference", rel},
                         {"max_third_level_population", r3.max_upper_population},
                         {"oscillation_period_tau", period},
                         {"high_frequency_residual", hf},
                         {"physicality_two_level", physicality_json(r2.report)},
                         {"physicality_three_level", physicality_json(r3.report)}};
    c.check("third-level-negligible", r3.max_upper_population < 1e-2,
            "max third-level population " + fmt(r3.max_upper_population) + " (< 1e-2)");
    c.check("peak-agreement", rel < 0.10, "relative peak difference " + fmt(rel) + " (< 0.1)");
    c.check("oscillations-present", hf > 1e-3, "high-frequency residual " + fmt(hf) + " (> 1e-3)");
}

BistableParams bistable_params(const SystemSpec& s) {
    if (s.n_qubits != 1) throw ConfigError("the analytic Q-function is for a single qubit");
    return {s.g.front(), s.kappa, s.gamma_s.front(), s.drive};
}

void run_bistability_q(const Context& c) {
    const SystemSpec spec = to_system_spec(c.cfg.spec);
    const BistableParams p = bistable_params(spec);
    if (!(p.gamma_s > 0.0) || p.gamma_s >= 2.0 * p.kappa)
        throw ConfigError("bistability-q needs 0 < gamma_s < 2 kappa (bistable regime)");
    analytic_q_bistable(0.0, 0.0, p, 1);  // regime guard
    const AnalyticQ q(p, c.cfg.numerics.quadrature_order);
    const double h = c.cfg.numerics.grid_spacing;
    const double x0 = 2.0 * p.drive / p.kappa;
    const double reach = std::abs(p.g) / p.kappa + c.cfg.numerics.grid_margin;
    const auto ys = grid_axis(-reach, reach, h);

    std::vector<std::vector<double>> rows;
    std::vector<double> section(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) {
        section[k] = q(x0, ys[k]);
        rows.push_back({x0, ys[k], section[k]});
    }
    c.csv("section.csv", {"x", "y", "Q"}, rows);

    // Q factorizes in x and y, so the grid sum is a product of two 1-D sums.
    const auto xs = grid_axis(x0 - 8.0, x0 + 8.0, h);
    const auto ys_wide = grid_axis(-reach - 5.0, reach + 5.0, h);
    double sx = 0.0, sy = 0.0;
    for (double x : xs) sx += std::exp(-(x - x0) * (x - x0));
    for (double y : ys_wide) sy += q(x0, y);
    const double norm = sx * sy * h * h;

    Json peaks = Json::array();
    std::vector<double> peak_y;
    for (std::size_t k = 1; k + 1 < ys.size(); ++k)
        if (section[k] > section[k - 1] && section[k] > section[k + 1]) {
            peak_y.push_back(ys[k]);
            peaks.push_back({{"x", x0}, {"y", ys[k]}, {"q_value", section[k]}});
        }
    const double g_over_kappa = p.g / p.kappa;
    bool near = peak_y.size() == 2;
    for (double y : peak_y) near = near && std::abs(std::abs(y) - g_over_kappa) < 1.0;
    c.res.summary = Json{{"x_section", x0},
                         {"quadrature_order", q.order()},
                         {"grid_sum", norm},
                         {"g_over_kappa", g_over_kappa},
                         {"section_peaks", peaks}};
    c.check("normalization", std::abs(norm - 1.0) <= 1e-3, "grid sum " + fmt(norm) + " (1 +- 1e-3)");
    std::string detail = "peaks at y =";
    for (double y : peak_y) detail += " " + fmt(y);
    c.check("two-peaks-near-g-over-kappa", near, detail + " vs +-" + fmt(g_over_kappa));
}

DrivenQOptions driven_options(const ScenarioConfig& cfg) {
    DrivenQOptions o;
    const auto& n = cfg.numerics;
    if (n.frame == "lab") o.displacement = Complex(0.0);
    o.auto_truncation = n.auto_truncation;
    o.truncation_cap = n.truncation_cap;
    o.spacing = n.grid_spacing;
    o.margin = n.grid_margin;
    o.min_prominence = n.min_prominence;
    return o;
}

void guard_size(const ScenarioConfig& cfg, const SystemSpec& spec) {
    if (cfg.numerics.allow_large || spec.qubits_identical()) return;
    const Index fock = cfg.numerics.auto_truncation ? cfg.numerics.truncation_cap : spec.n_max;
    const double rows = std::pow(static_cast<double>(fock) * std::pow(2.0, spec.n_qubits), 2.0);
    if (rows > 1e5)
        throw ResourceError("non-identical qubits give a " + fmt(rows) +
                            "-row steady-state system; set numerics.allow_large=true to run it");
}

Json peak_table(const DrivenQResult& r) {
    Json out = Json::array();
    for (const auto& m : r.matches) {
        if (!m.predicted.defined) continue;
        Json row{{"l", m.predicted.l}, {"m", m.predicted.m}};
        row["x"] = m.peak ? Json(m.peak->x) : Json(nullptr);
        row["y"] = m.peak ? Json(m.peak->y) : Json(nullptr);
        row["q_value"] = m.peak ? Json(m.peak->q_value) : Json(nullptr);
        row["alpha_predicted_re"] = m.predicted.alpha.real();
        row["alpha_predicted_im"] = m.predicted.alpha.imag();
        row["distance"] = std::isfinite(m.distance) ? Json(m.distance) : Json(nullptr);
        row["matched"] = m.matched;
        out.push_back(row);
    }
    return out;
}

Json steady_json(const DrivenQResult& r) {
    return Json{{"method", r.steady.method},
                {"symmetry_reduced", r.steady.symmetry_reduced},
                {"system_rows", r.steady.system_rows},
                {"residual", r.steady.residual},
                {"relative_residual", r.steady.relative_residual},
                {"uniqueness", r.steady.uniqueness == Uniqueness::Verified ? "verified" : "assumed"},
                {"trace_defect", r.diagnostics.trace_defect},
                {"hermiticity_defect", r.diagnostics.hermiticity_defect},
                {"min_eigenvalue", r.diagnostics.min_eigenvalue},
                {"truncation", r.truncation},
                {"top_fock_population", r.top_fock},
                {"displacement_re", r.displacement.real()},
                {"displacement_im", r.displacement.imag()}};
}

void run_driven_q(const Context& c) {
    const SystemSpec spec = to_system_spec(c.cfg.spec);
    guard_size(c.cfg, spec);
    const DrivenQResult r = driven_q(spec, driven_options(c.cfg));

    std::vector<std::vector<double>> rows;
    for (std::size_t ix = 0; ix < r.grid.xs.size(); ++ix)
        for (std::size_t iy = 0; iy < r.grid.ys.size(); ++iy)
            rows.push_back({r.grid.xs[ix], r.grid.ys[iy], r.grid.values(static_cast<Index>(iy), static_cast<Index>(ix))});
    c.csv("grid.csv", {"x", "y", "Q"}, rows);
    const Json table = peak_table(r);
    c.json("peaks.json", Json{{"peaks", table}});

    Json detected = Json::array();
    for (const auto& p : r.grid.peaks) detected.push_back({{"x", p.x}, {"y", p.y}, {"q_value", p.q_value}});
    std::size_t expected = 0, matched = 0;
    for (const auto& m : r.matches)
        if (m.predicted.defined) {
            ++expected;
            matched += m.matched;
        }
    c.res.summary = Json{{"steady_state", steady_json(r)},
                         {"grid_sum", r.grid.riemann_sum()},
                         {"detected_peaks", detected},
                         {"matches", table}};

    c.check("peak-count", r.grid.peaks.size() == expected,
            std::to_string(r.grid.peaks.size()) + " peaks detected, " + std::to_string(expected) + " predicted");
    c.check("peaks-match-prediction", matched == expected,
            std::to_string(matched) + " of " + std::to_string(expected) + " predictions within 1.5 grid spacings");
    if (spec.n_qubits >= 2) {
        // Inner |m| peaks taller than outer |m| peaks.
        double inner = std::numeric_limits<double>::infinity(), outer = 0.0;
        const double m_max = spec.n_qubits / 2.0, m_min = (spec.n_qubits % 2) ? 0.5 : 0.0;
        bool have_both = true;
        for (const auto& m : r.matches) {
            if (!m.predicted.defined) continue;
            const double am = std::abs(m.predicted.m);
            if (!m.matched) {
                if (am == m_min || am == m_max) have_both = false;
                continue;
            }
            if (am == m_min) inner = std::min(inner, m.peak->q_value);
            if (am == m_max) outer = std::max(outer, m.peak->q_value);
        }
        const bool ok = have_both && inner > outer;
        c.check("centre-peaks-taller", ok,
                have_both ? "inner min Q " + fmt(inner) + ", outer max Q " + fmt(outer)
                          : "inner or outer peaks not detected");
    }
    c.check("steady-state-residual", r.steady.relative_residual <= 1e-9,
            "relative residual " + fmt(r.steady.relative_residual) + " (<= 1e-9)");
}

void run_peak_sweep(const Context& c) {
    const SystemSpec spec = to_system_spec(c.cfg.spec);
    guard_size(c.cfg, spec);
    std::vector<double> drives;
    for (double e : c.cfg.numerics.drives_mhz) drives.push_back(kTwoPi * e);
    const auto pts = peak_sweep(spec, drives, driven_options(c.cfg), c.opt.jobs);

    std::vector<std::vector<double>> rows;
    Json points = Json::array();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& pt : pts) {
        for (const auto& m : pt.result.matches) {
            if (!m.predicted.defined) continue;
            rows.push_back({pt.drive / kTwoPi, m.predicted.m, m.peak ? m.peak->x : nan, m.peak ? m.peak->y : nan,
                            m.predicted.alpha.real(), m.predicted.alpha.imag(), m.distance});
        }
        points.push_back({{"drive_mhz", pt.drive / kTwoPi},
                          {"distance", pt.distance},
                          {"n_detected", pt.result.grid.peaks.size()},
                          {"steady_state", steady_json(pt.result)},
                          {"peaks", peak_table(pt.result)}});
    }
    c.csv("peaks.csv", {"drive_mhz", "m", "x_numeric", "y_numeric", "x_analytic", "y_analytic", "distance"}, rows);
    c.json("peaks.json", Json{{"points", points}});
    c.res.summary = Json{{"points", points}};

    const double tol = 1.5 * c.cfg.numerics.grid_spacing;
    const double first = pts.front().distance, last = pts.back().distance;
    c.check("large-drive-coincide", last <= tol, "distance at the largest drive " + fmt(last) + " (<= " + fmt(tol) + ")");
    bool decreasing = true;
    std::string trend = "distances";
    for (std::size_t k = 0; k < pts.size(); ++k) {
        trend += " " + fmt(pts[k].distance);
        if (k > 0) decreasing = decreasing && pts[k].distance < pts[k - 1].distance;
    }
    c.check("distance-decreases", decreasing && first > last, trend);
}

template <class E>
[[noreturn]] void rethrow_with(const std::string& scenario, const E& e) {
    throw E("scenario " + scenario + ": " + e.what());
}

}  // namespace

bool ScenarioResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    validate(config);
    ScenarioResult res;
    res.scenario = config.scenario;
    res.config = to_json(config);
    const Context ctx{config, options, res};
    try {
        if (config.kind == "superradiance") run_superradiance(ctx);
        else if (config.kind == "kappa-sweep") run_kappa_sweep(ctx);
        else if (config.kind == "three-level-compare") run_three_level(ctx);
        else if (config.kind == "bistability-q") run_bistability_q(ctx);
        else if (config.kind == "peak-sweep") run_peak_sweep(ctx);
        else run_driven_q(ctx);
    } catch (const ConfigError& e) {
        rethrow_with(config.scenario, e);
    } catch (const DimensionError& e) {
        rethrow_with(config.scenario, e);
    } catch (const DomainError& e) {
        rethrow_with(config.scenario, e);
    } catch (const TruncationError& e) {
        rethrow_with(config.scenario, e);
    } catch (const ResourceError& e) {
        rethrow_with(config.scenario, e);
    } catch (const NumericalError& e) {
        rethrow_with(config.scenario, e);
    }

    Json checks = Json::array();
    for (const auto& c : res.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    Json summary{{"scenario", config.scenario}, {"passed", res.passed()}, {"checks", checks}};
    if (!res.warnings.empty()) summary["warnings"] = res.warnings;
    for (auto it = res.summary.begin(); it != res.summary.end(); ++it) summary[it.key()] = it.value();
    res.summary = summary;
    ctx.json("summary.json", summary);
    return res;
}

}  // namespace dicke
