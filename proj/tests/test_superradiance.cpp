#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dicke/errors.hpp"
#include "dicke/superradiance.hpp"

using namespace dicke;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace

TEST_CASE("single emitter decays exponentially") {
    const auto tau = uniform_grid(4.0, 0.01);
    for (const auto& sol : {dicke_ladder_evolve(1, tau), dicke_ladder_closed_form(1, tau)}) {
        double worst = 0.0;
        for (std::size_t k = 0; k < tau.size(); ++k) worst = std::max(worst, std::abs(sol.intensity[k] - std::exp(-tau[k])));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("two emitters: double pole gives (1 + 2 tau) exp(-2 tau)") {
    // Rates r0 = r1 = 2; P0 = e^{-2t}, P1 = 2t e^{-2t}.
    const auto tau = uniform_grid(3.0, 0.01);
    const auto cf = dicke_ladder_closed_form(2, tau);
    const auto ode = dicke_ladder_evolve(2, tau);
    for (std::size_t k = 0; k < tau.size(); ++k) {
        const double t = tau[k];
        const double expect = 2.0 * std::exp(-2.0 * t) * (1.0 + 2.0 * t);
        CHECK(std::abs(cf.intensity[k] - expect) < 1e-12);
        CHECK(std::abs(ode.intensity[k] - expect) < 1e-9);
        CHECK(std::abs(cf.populations(Eigen::Index(k), 1) - 2.0 * t * std::exp(-2.0 * t)) < 1e-12);
    }
}

TEST_CASE("ladder rates and poles") {
    // r_n = (N - n)(n + 1): N = 3 gives 3, 4, 3, 0.
    const auto p = ladder_poles(3, 2);
    REQUIRE(p.size() == 2);
    CHECK(p[0].rate == 3.0);
    CHECK(p[0].multiplicity == 2);
    CHECK(p[1].rate == 4.0);
    CHECK(p[1].multiplicity == 1);
    const auto top = ladder_poles(5, 5);
    CHECK(top.front().rate == 0.0);
}

TEST_CASE("closed form, ODE and printed formulas agree") {
    const auto tau = uniform_grid(3.0, 0.005);
    for (int n : {3, 4, 5}) {
        CAPTURE(n);
        const auto cf = dicke_ladder_closed_form(n, tau);
        const auto ode = dicke_ladder_evolve(n, tau);
        std::vector<double> printed(tau.size());
        std::transform(tau.begin(), tau.end(), printed.begin(), [&](double t) { return analytic_intensity(n, t); });
        CHECK(sup_diff(cf.intensity, ode.intensity) < 1e-8);
        CHECK(sup_diff(cf.intensity, printed) < 1e-8);
        CHECK(std::abs(cf.intensity.front() - n) < 1e-12);
    }
}

TEST_CASE("populations stay a probability distribution") {
    const auto tau = uniform_grid(3.0, 0.05);
    const auto sol = dicke_ladder_evolve(5, tau);
    for (Eigen::Index k = 0; k < sol.populations.rows(); ++k) {
        CHECK(std::abs(sol.populations.row(k).sum() - 1.0) < 1e-10);
        CHECK(sol.populations.row(k).minCoeff() > -1e-12);
    }
}

TEST_CASE("flux intensity equals the derivative of emitted photons") {
    const auto tau = uniform_grid(3.0, 0.01);
    const auto sol = dicke_ladder_closed_form(4, tau);
    CHECK(sup_diff(sol.intensity, sol.intensity_diff) < 1e-6);
}

TEST_CASE("peak intensity grows faster than N") {
    const auto tau = uniform_grid(3.0, 0.001);
    double last = 0.0, last_ratio = 0.0;
    for (int n = 2; n <= 5; ++n) {
        const auto sol = dicke_ladder_closed_form(n, tau);
        const auto chk = superradiance_check(tau, sol.intensity, n);
        CAPTURE(n);
        CHECK(chk.i_max > last);
        CHECK(chk.i_max / n >= last_ratio);
        last = chk.i_max;
        last_ratio = chk.i_max / n;
        if (n >= 3) CHECK(chk.superradiant);
    }
}

TEST_CASE("superradiance check refines the maximum") {
    std::vector<double> tau, y;
    for (int k = 0; k <= 100; ++k) {
        tau.push_back(0.01 * k);
        y.push_back(3.0 - std::pow(tau.back() - 0.3333, 2));
    }
    const auto c = superradiance_check(tau, y, 2);
    CHECK(std::abs(c.tau_max - 0.3333) < 1e-10);
    CHECK(std::abs(c.i_max - 3.0) < 1e-10);
    CHECK(c.superradiant);
}

TEST_CASE("effective rates") {
    SystemSpec s = SystemSpec::uniform(3, 0.0, 2000.0 * two_pi, 0.0, 0.0, 4);
    s.g = {83.7 * two_pi, 85.7 * two_pi, 85.1 * two_pi};
    const EffectiveRates r = effective_rate(s);
    CHECK(std::abs(r.gbar / two_pi - 84.8333333) < 1e-6);
    CHECK(std::abs(r.R1 / two_pi - 14.394) < 1e-3);
    CHECK(std::abs(r.gamma - r.R1) < 1e-12);
    s.delta_r = s.kappa / 2.0;
    CHECK(std::abs(effective_rate(s).gamma - r.R1 / 2.0) < 1e-12);
    s.kappa = 0.0;
    CHECK_THROWS_AS(effective_rate(s), ConfigError);
}

TEST_CASE("full master equation in the good-cavity Purcell limit") {
    // One emitter, kappa = 100 g: the field follows adiabatically and I ~ exp(-tau).
    SystemSpec s = SystemSpec::uniform(1, 1.0, 100.0, 0.0, 0.0, 3);
    const auto tau = uniform_grid(3.0, 0.05);
    const auto out = full_me_intensity(s, tau);
    CHECK_FALSE(out.bad_cavity_warning);
    CHECK(out.intensity.front() == doctest::Approx(0.0));
    for (std::size_t k = 0; k < tau.size(); ++k)
        if (tau[k] >= 0.5) CHECK(std::abs(out.intensity[k] - std::exp(-tau[k])) < 0.03);
    CHECK(out.max_top_fock < 1e-6);
}

TEST_CASE("full master equation guards") {
    const auto tau = uniform_grid(1.0, 0.1);
    SUBCASE("zero coupling") {
        CHECK_THROWS_AS(full_me_intensity(SystemSpec::uniform(2, 0.0, 10.0, 0.0, 0.0, 3), tau), ConfigError);
    }
    SUBCASE("bad cavity is flagged") {
        const auto out = full_me_intensity(SystemSpec::uniform(1, 1.0, 5.0, 0.0, 0.0, 4), tau);
        CHECK(out.bad_cavity_warning);
    }
    SUBCASE("truncation") {
        // Strong coupling with two photons allowed cannot hold three excitations.
        FullMeOptions opt;
        opt.top_fock_limit = 1e-6;
        CHECK_THROWS_AS(full_me_intensity(SystemSpec::uniform(3, 1.0, 1.0, 0.0, 0.0, 3), tau, opt), TruncationError);
    }
}

TEST_CASE("closed form limits") {
    const std::vector<double> tau{0.0, 1.0};
    CHECK_THROWS_AS(dicke_ladder_closed_form(6, tau), DomainError);
    CHECK_THROWS_AS(analytic_intensity(2, 0.5), DomainError);
    CHECK_THROWS_AS(analytic_intensity(6, 0.5), DomainError);
}

TEST_CASE("finite difference weights") {
    const std::vector<double> x{-2, -1, 0, 1, 2};
    const auto w = finite_difference_weights(0.0, x);
    const std::vector<double> expect{1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(w[k] - expect[k]) < 1e-14);
}

TEST_CASE("high-frequency residual") {
    std::vector<double> flat(200, 1.0), wavy(200);
    for (std::size_t k = 0; k < wavy.size(); ++k) wavy[k] = 1.0 + 0.1 * std::sin(2.0 * std::numbers::pi * double(k) / 10.0);
    CHECK(high_frequency_residual(flat, 10) < 1e-14);
    CHECK(high_frequency_residual(wavy, 10) > 0.09);
}

TEST_CASE("uniform grid") {
    const auto g = uniform_grid(3.0, 0.005);
    CHECK(g.size() == 601);
    CHECK(g.back() == doctest::Approx(3.0));
}

TEST_CASE("halving the integrator tolerance leaves the intensity curve in place") {
    SystemSpec s = SystemSpec::uniform(3, 1.0, 25.0, 0.002, 0.0, 5);
    s.g = {0.98, 1.01, 1.0};
    const auto tau = uniform_grid(3.0, 0.01);
    FullMeOptions loose, tight;
    tight.evolve.rtol = loose.evolve.rtol / 2.0;
    tight.evolve.atol = loose.evolve.atol / 2.0;
    const auto a = full_me_intensity(s, tau, loose);
    const auto b = full_me_intensity(s, tau, tight);
    CHECK(sup_diff(a.intensity, b.intensity) < 1e-5);
}
