#include "dicke/superradiance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "dicke/errors.hpp"
#include "dicke/ode.hpp"

namespace dicke {

namespace {

double ladder_rate(int n_emitters, int n) { return static_cast<double>((n_emitters - n) * (n + 1)); }

void check_tau(std::span<const double> tau) {
    for (std::size_t k = 0; k < tau.size(); ++k) {
        if (!std::isfinite(tau[k]) || tau[k] < 0.0) throw DomainError("tau grid must be finite and >= 0");
        if (k > 0 && tau[k] <= tau[k - 1]) throw DomainError("tau grid must be strictly increasing");
    }
}

}  // namespace

EffectiveRates effective_rate(const SystemSpec& spec) {
    if (!(spec.kappa > 0.0)) throw ConfigError("effective rate needs kappa > 0");
    EffectiveRates r;
    r.gbar = spec.mean_coupling();
    r.Gamma = Complex(spec.kappa / 2.0, spec.delta_r);
    r.gamma = spec.kappa * r.gbar * r.gbar / std::norm(r.Gamma);
    r.R1 = 4.0 * r.gbar * r.gbar / spec.kappa;
    return r;
}

std::vector<double> uniform_grid(double end, double step) {
    if (!(step > 0.0) || !(end >= 0.0)) throw DomainError("uniform_grid: need step > 0 and end >= 0");
    const auto count = static_cast<std::size_t>(std::llround(end / step));
    std::vector<double> out(count + 1);
    for (std::size_t k = 0; k <= count; ++k) out[k] = static_cast<double>(k) * step;
    return out;
}

DickeLadderSolution dicke_ladder_evolve(int n_emitters, std::span<const double> tau, double rtol) {
    if (n_emitters < 1) throw DomainError("dicke ladder needs N >= 1");
    check_tau(tau);
    const int n = n_emitters;
    DickeLadderSolution sol;
    sol.n_emitters = n;
    sol.tau.assign(tau.begin(), tau.end());
    sol.populations.resize(static_cast<Index>(tau.size()), n + 1);
    sol.method = LadderMethod::Ode;

    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(n + 1);
    p0(0) = 1.0;
    auto rhs = [n](double, const Eigen::VectorXd& p, Eigen::VectorXd& dp) {
        for (int k = 0; k <= n; ++k) {
            dp(k) = -ladder_rate(n, k) * p(k);
            if (k > 0) dp(k) += ladder_rate(n, k - 1) * p(k - 1);
        }
    };
    StepControl ctl;
    ctl.rtol = rtol;
    ctl.atol = rtol * 1e-2;
    integrate_dopri<Eigen::VectorXd>(rhs, p0, tau, ctl, [&](std::size_t k, double, const Eigen::VectorXd& p) {
        sol.populations.row(static_cast<Index>(k)) = p.transpose();
    });
    intensity_from_populations(sol);
    return sol;
}

std::vector<LadderPole> ladder_poles(int n_emitters, int n) {
    if (n < 0 || n > n_emitters) throw DomainError("ladder_poles: n outside 0..N");
    std::map<int, int> count;
    for (int i = 0; i <= n; ++i) ++count[(n_emitters - i) * (i + 1)];
    std::vector<LadderPole> out;
    for (auto [rate, m] : count) out.push_back({static_cast<double>(rate), m});
    return out;
}

DickeLadderSolution dicke_ladder_closed_form(int n_emitters, std::span<const double> tau) {
    if (n_emitters < 1) throw DomainError("dicke ladder needs N >= 1");
    if (n_emitters > 5) throw DomainError("closed-form ladder is limited to N <= 5; use dicke_ladder_evolve");
    check_tau(tau);
    const int big_n = n_emitters;
    DickeLadderSolution sol;
    sol.n_emitters = big_n;
    sol.tau.assign(tau.begin(), tau.end());
    sol.populations.resize(static_cast<Index>(tau.size()), big_n + 1);
    sol.method = LadderMethod::ClosedForm;

    for (int n = 0; n <= big_n; ++n) {
        // Q(n, s) = C / prod_i (s + r_i), C = prod_{k<n} r_k.
        double c = 1.0;
        for (int k = 0; k < n; ++k) c *= ladder_rate(big_n, k);
        const auto poles = ladder_poles(big_n, n);
        struct Term {
            double p, h, dh;
            int m;
        };
        std::vector<Term> terms;
        for (const auto& pole : poles) {
            const double p = -pole.rate;
            double h = c;
            double dlog = 0.0;
            for (const auto& other : poles) {
                if (other.rate == pole.rate) continue;
                const double q = -other.rate;
                h /= std::pow(p - q, other.multiplicity);
                dlog -= other.multiplicity / (p - q);
            }
            if (pole.multiplicity > 2) throw NumericalError("ladder pole of multiplicity > 2");
            terms.push_back({p, h, h * dlog, pole.multiplicity});
        }
        for (std::size_t k = 0; k < tau.size(); ++k) {
            const double t = tau[k];
            double v = 0.0;
            for (const auto& term : terms) {
                const double e = std::exp(term.p * t);
                v += term.m == 1 ? term.h * e : e * (term.dh + t * term.h);
            }
            sol.populations(static_cast<Index>(k), n) = v;
        }
    }
    intensity_from_populations(sol);
    return sol;
}

std::vector<double> finite_difference_weights(double x0, std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) throw DomainError("finite differences need at least two nodes");
    // c[j][d]: weight of node j for derivative order d (0 or 1).
    std::vector<std::array<double, 2>> c(n, {0.0, 0.0});
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int d = mn; d >= 1; --d)
                    c[i][static_cast<std::size_t>(d)] =
                        c1 * (d * c[i - 1][static_cast<std::size_t>(d - 1)] - c5 * c[i - 1][static_cast<std::size_t>(d)]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int d = mn; d >= 1; --d)
                c[j][static_cast<std::size_t>(d)] =
                    (c4 * c[j][static_cast<std::size_t>(d)] - d * c[j][static_cast<std::size_t>(d - 1)]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = c[j][1];
    return w;
}

void intensity_from_populations(DickeLadderSolution& sol) {
    const int big_n = sol.n_emitters;
    const auto rows = static_cast<std::size_t>(sol.populations.rows());
    sol.intensity.assign(rows, 0.0);
    std::vector<double> emitted(rows, 0.0);
    for (std::size_t k = 0; k < rows; ++k) {
        for (int n = 0; n <= big_n; ++n) {
            const double p = sol.populations(static_cast<Index>(k), n);
            sol.intensity[k] += ladder_rate(big_n, n) * p;
            emitted[k] += n * p;
        }
    }
    sol.intensity_diff.assign(rows, 0.0);
    if (rows < 2) return;
    const std::size_t width = std::min<std::size_t>(7, rows);
    for (std::size_t k = 0; k < rows; ++k) {
        std::size_t lo = k >= width / 2 ? k - width / 2 : 0;
        lo = std::min(lo, rows - width);
        const std::span<const double> nodes(sol.tau.data() + lo, width);
        const auto w = finite_difference_weights(sol.tau[k], nodes);
        double d = 0.0;
        for (std::size_t j = 0; j < width; ++j) d += w[j] * emitted[lo + j];
        sol.intensity_diff[k] = d;
    }
}

double analytic_intensity(int n_emitters, double tau) {
    const double t = tau;
    switch (n_emitters) {
        case 3:
            return 3.0 * std::exp(-3.0 * t) * (12.0 * t - 7.0) + 24.0 * std::exp(-4.0 * t);
        case 4:
            return (72.0 * t + 96.0) * std::exp(-6.0 * t) + 4.0 * std::exp(-4.0 * t) * (36.0 * t - 23.0);
        case 5:
            return 5.0 / 3.0 *
                   (162.0 * std::exp(-9.0 * t) + 16.0 * std::exp(-8.0 * t) * (24.0 * t - 1.0) +
                    std::exp(-5.0 * t) * (240.0 * t - 143.0));
        default:
            throw DomainError("analytic intensity is available for N = 3, 4, 5 only");
    }
}

SuperradianceCheck superradiance_check(std::span<const double> tau, std::span<const double> intensity,
                                       int n_emitters) {
    if (tau.size() != intensity.size() || tau.empty())
        throw DomainError("superradiance_check: tau and intensity must be non-empty and equal length");
    const auto it = std::max_element(intensity.begin(), intensity.end());
    const auto k = static_cast<std::size_t>(it - intensity.begin());
    SuperradianceCheck out{false, *it, tau[k]};
    if (k > 0 && k + 1 < tau.size()) {
        // Parabola through the three samples around the maximum.
        const double x0 = tau[k - 1], x1 = tau[k], x2 = tau[k + 1];
        const double y0 = intensity[k - 1], y1 = intensity[k], y2 = intensity[k + 1];
        const double d01 = (y1 - y0) / (x1 - x0);
        const double d12 = (y2 - y1) / (x2 - x1);
        const double a = (d12 - d01) / (x2 - x0);
        if (a < 0.0) {
            const double b = d01 - a * (x0 + x1);
            const double xv = std::clamp(-b / (2.0 * a), x0, x2);
            const double yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
            if (yv >= y1) {
                out.tau_max = xv;
                out.i_max = yv;
            }
        }
    }
    out.superradiant = out.i_max > static_cast<double>(n_emitters);
    return out;
}

double high_frequency_residual(std::span<const double> signal, std::size_t window) {
    if (window < 1) throw DomainError("high_frequency_residual: window must be >= 1");
    const std::size_t half = window / 2;
    const std::size_t width = 2 * half + 1;
    if (signal.size() < width) return 0.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < width; ++k) sum += signal[k];
    double worst = 0.0;
    for (std::size_t c = half;; ++c) {
        worst = std::max(worst, std::abs(signal[c] - sum / static_cast<double>(width)));
        if (c + half + 1 >= signal.size()) break;
        sum += signal[c + half + 1] - signal[c - half];
    }
    return worst;
}

FullMeIntensity full_me_intensity(const SystemSpec& spec, std::span<const double> tau,
                                  const FullMeOptions& options) {
    if (spec.drive != 0.0) throw ConfigError("full_me_intensity expects an undriven model");
    check_tau(tau);
    const LindbladModel model = build_model(spec);
    const Liouvillian l = liouvillian(model);
    FullMeIntensity out;
    out.rates = effective_rate(spec);
    if (!(out.rates.gamma > 0.0)) throw ConfigError("full_me_intensity needs a nonzero effective rate (g > 0)");
    out.bad_cavity_warning = spec.kappa < 10.0 * out.rates.gbar;
    out.tau.assign(tau.begin(), tau.end());
    out.intensity.assign(tau.size(), 0.0);
    out.upper_population.assign(tau.size(), 0.0);

    std::vector<double> times(tau.size());
    std::transform(tau.begin(), tau.end(), times.begin(), [&](double x) { return x / out.rates.gamma; });
    const Operator n_op = photon_number(model.dims);
    const Operator f_op = upper_level_population(model.dims);
    const DensityState rho0 = DensityState::from_pure(fully_excited_state(model.dims));

    out.report = evolve(l, rho0, times, options.evolve, [&](std::size_t k, double t, const DensityState& rho) {
        out.intensity[k] = spec.kappa * expectation(rho, n_op).real() / out.rates.gamma;
        out.upper_population[k] = expectation(rho, f_op).real();
        out.max_upper_population = std::max(out.max_upper_population, out.upper_population[k]);
        const double top = top_fock_population(rho);
        out.max_top_fock = std::max(out.max_top_fock, top);
        if (top > options.top_fock_limit) {
            std::ostringstream os;
            os << "top Fock level population " << top << " exceeds " << options.top_fock_limit << " at t = " << t
               << "; raise n_max (currently " << spec.n_max << ")";
            throw TruncationError(os.str());
        }
    });
    return out;
}

}  // namespace dicke
