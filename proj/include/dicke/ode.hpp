#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <string>

#include "dicke/errors.hpp"

namespace dicke {

struct StepControl {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 0.0;  // 0 picks one from the initial derivative
    long max_steps = 10'000'000;
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) for an Eigen vector type.
///
/// Steps are clipped so every requested output time is hit exactly; `observe(k, t, y)`
/// is called for each output index k. Throws NumericalError naming the last good
/// time on step-size underflow or when the step budget runs out.
template <class Vec, class Rhs, class Observer>
IntegrationStats integrate_dopri(Rhs&& f, Vec y, std::span<const double> times, const StepControl& ctl,
                                 Observer&& observe) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    IntegrationStats stats;
    if (times.empty()) return stats;
    double t = 0.0;
    std::size_t next = 0;
    while (next < times.size() && times[next] <= t) observe(next++, t, y);
    if (next == times.size()) return stats;

    const Eigen::Index n = y.size();
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
    f(t, y, k1);
    ++stats.rhs_evaluations;

    auto err_norm = [&](const Vec& err, const Vec& a, const Vec& b) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = ctl.atol + ctl.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
            const double r = std::abs(err[i]) / sc;
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(n, 1)));
    };

    double h = ctl.initial_step;
    if (h <= 0.0) {
        const Vec zero = Vec::Zero(n);
        const double yn = err_norm(y, zero, zero);
        const double fn = err_norm(k1, zero, zero);
        const double span = times.back() - t;
        h = (yn < 1e-5 || fn < 1e-5) ? 1e-6 * span : 0.01 * yn / fn;
        h = std::min(h, span);
    }

    long steps = 0;
    while (next < times.size()) {
        if (++steps > ctl.max_steps) {
            std::ostringstream os;
            os << "integrator exceeded " << ctl.max_steps << " steps; last good time " << t;
            throw NumericalError(os.str());
        }
        const double target = times[next];
        bool clipped = false;
        double h_try = h;
        if (t + h_try >= target) {
            h_try = target - t;
            clipped = true;
        }
        if (h_try <= 1e-14 * std::max(1.0, std::abs(t))) {
            std::ostringstream os;
            os << "step size underflow (h = " << h_try << "); last good time " << t;
            throw NumericalError(os.str());
        }

        ytmp = y + h_try * (a21 * k1);
        f(t + c2 * h_try, ytmp, k2);
        ytmp = y + h_try * (a31 * k1 + a32 * k2);
        f(t + c3 * h_try, ytmp, k3);
        ytmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h_try, ytmp, k4);
        ytmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h_try, ytmp, k5);
        ytmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h_try, ytmp, k6);
        ynew = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + h_try, ynew, k7);
        stats.rhs_evaluations += 6;

        ytmp = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = err_norm(ytmp, y, ynew);
        if (!std::isfinite(err)) {
            std::ostringstream os;
            os << "non-finite error estimate; last good time " << t;
            throw NumericalError(os.str());
        }

        if (err <= 1.0) {
            ++stats.accepted;
            t = clipped ? target : t + h_try;
            y.swap(ynew);
            k1.swap(k7);
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            // A clipped step says nothing about the natural step size; keep the larger one.
            h = clipped ? std::max(h, h_try * factor) : h_try * factor;
            while (next < times.size() && times[next] <= t) observe(next++, t, y);
        } else {
            ++stats.rejected;
            h = h_try * std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    return stats;
}

}  // namespace dicke
