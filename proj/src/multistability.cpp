#include "dicke/multistability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "dicke/errors.hpp"
#include "dicke/liouvillian.hpp"

namespace dicke {

namespace {

constexpr double kPi = std::numbers::pi;

void check_grid(const GridSpec& g) {
    if (!(g.spacing > 0.0) || !(g.x_max > g.x_min) || !(g.y_max > g.y_min))
        throw DomainError("grid: need spacing > 0 and non-empty ranges");
}

}  // namespace

std::vector<double> grid_axis(double lo, double hi, double spacing) {
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / spacing + 1e-9));
    std::vector<double> out(count + 1);
    for (std::size_t k = 0; k <= count; ++k) out[k] = lo + static_cast<double>(k) * spacing;
    return out;
}

double PhaseSpaceGrid::riemann_sum() const { return values.sum() * spacing * spacing; }

PhaseSpaceGrid q_function(const DensityState& rho_field, const GridSpec& spec, double min_prominence,
                          double top_fock_limit) {
    if (rho_field.dims().size() != 1) throw DimensionError("q_function expects a cavity-only state");
    check_grid(spec);
    const double top = top_fock_population(rho_field);
    if (top > top_fock_limit) {
        std::ostringstream os;
        os << "top Fock level population " << top << " exceeds " << top_fock_limit << "; raise the truncation";
        throw TruncationError(os.str());
    }
    const Index d = rho_field.side();
    const Complex beta = rho_field.displacement();
    PhaseSpaceGrid grid;
    grid.spacing = spec.spacing;
    grid.xs = grid_axis(spec.x_min, spec.x_max, spec.spacing);
    grid.ys = grid_axis(spec.y_min, spec.y_max, spec.spacing);
    const auto nx = static_cast<Index>(grid.xs.size());
    const auto ny = static_cast<Index>(grid.ys.size());
    grid.values.resize(ny, nx);
    const DenseMatrix& rho = rho_field.matrix();
    for (Index ix = 0; ix < nx; ++ix) {
        for (Index iy = 0; iy < ny; ++iy) {
            // <alpha| D(beta) rho D(beta)^dag |alpha> = <alpha - beta| rho |alpha - beta>.
            const Complex a = Complex(grid.xs[static_cast<std::size_t>(ix)], grid.ys[static_cast<std::size_t>(iy)]) - beta;
            const Vector c = coherent_amplitudes(a, d);
            const double q = c.dot(rho * c).real() / kPi;
            grid.values(iy, ix) = std::max(q, 0.0);
        }
    }
    grid.peaks = find_q_peaks(grid, min_prominence);
    return grid;
}

std::vector<QPeak> find_q_peaks(const PhaseSpaceGrid& grid, double min_prominence) {
    const Eigen::MatrixXd& v = grid.values;
    std::vector<QPeak> peaks;
    if (v.rows() < 3 || v.cols() < 3) return peaks;
    const double floor = min_prominence * v.maxCoeff();

    // Least squares for q = c0 + c1 u + c2 w + c3 u^2 + c4 u w + c5 w^2 on the 3 x 3 stencil.
    Eigen::Matrix<double, 9, 6> design;
    for (int k = 0; k < 9; ++k) {
        const double u = k % 3 - 1, w = k / 3 - 1;
        design.row(k) << 1.0, u, w, u * u, u * w, w * w;
    }
    const Eigen::Matrix<double, 6, 9> pinv =
        (design.transpose() * design).inverse() * design.transpose();

    for (Index iy = 1; iy + 1 < v.rows(); ++iy) {
        for (Index ix = 1; ix + 1 < v.cols(); ++ix) {
            const double c = v(iy, ix);
            if (c < floor || c <= 0.0) continue;
            bool strict = true;
            for (int dy = -1; dy <= 1 && strict; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if ((dx || dy) && v(iy + dy, ix + dx) >= c) {
                        strict = false;
                        break;
                    }
            if (!strict) continue;

            Eigen::Matrix<double, 9, 1> samples;
            for (int k = 0; k < 9; ++k) samples(k) = v(iy + k / 3 - 1, ix + k % 3 - 1);
            const Eigen::Matrix<double, 6, 1> coef = pinv * samples;
            Eigen::Matrix2d hess;
            hess << 2.0 * coef(3), coef(4), coef(4), 2.0 * coef(5);
            double u = 0.0, w = 0.0, q = c;
            if (hess.determinant() > 0.0 && hess(0, 0) < 0.0) {
                const Eigen::Vector2d shift = hess.lu().solve(-Eigen::Vector2d(coef(1), coef(2)));
                if (std::abs(shift(0)) <= 1.0 && std::abs(shift(1)) <= 1.0) {
                    u = shift(0);
                    w = shift(1);
                    q = coef(0) + coef(1) * u + coef(2) * w + coef(3) * u * u + coef(4) * u * w + coef(5) * w * w;
                }
            }
            peaks.push_back({grid.xs[static_cast<std::size_t>(ix)] + u * grid.spacing,
                             grid.ys[static_cast<std::size_t>(iy)] + w * grid.spacing, q});
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const QPeak& a, const QPeak& b) { return a.q_value > b.q_value; });
    return peaks;
}

AnalyticQ::AnalyticQ(const BistableParams& params, int order) : p_(params) {
    if (!(params.kappa > 0.0)) throw DomainError("analytic Q needs kappa > 0");
    if (!(params.gamma_s > 0.0))
        throw DomainError("analytic Q needs gamma_s > 0 (the beta normalization degenerates at 0)");
    const double p = params.gamma_s / (2.0 * params.kappa);
    auto make = [p](int n) {
        QuadratureRule r = gauss_jacobi(n, p - 1.0, p - 1.0);
        double total = 0.0;
        for (double w : r.weights) total += w;
        for (double& w : r.weights) w /= total;
        return r;
    };
    if (order > 0) {
        rule_ = make(order);
        return;
    }
    // Probe the y range where the integrand matters.
    const double reach = std::abs(params.g) / params.kappa + 6.0;
    std::vector<double> probe;
    for (int k = 0; k <= 64; ++k) probe.push_back(-reach + 2.0 * reach * k / 64.0);
    int n = 32;
    QuadratureRule cur = make(n);
    while (true) {
        QuadratureRule next = make(2 * n);
        double diff = 0.0, scale = 0.0;
        for (double y : probe) {
            const double a = z_average(y, cur), b = z_average(y, next);
            diff = std::max(diff, std::abs(a - b));
            scale = std::max(scale, std::abs(b));
        }
        if (diff <= 1e-12 * scale || 2 * n >= 8192) {
            rule_ = std::move(next);
            return;
        }
        n *= 2;
        cur = std::move(next);
    }
}

double AnalyticQ::z_average(double y, const QuadratureRule& rule) const {
    const double s = p_.g / p_.kappa;
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double u = s * rule.nodes[k] - y;
        acc += rule.weights[k] * std::exp(-u * u);
    }
    return acc;
}

double AnalyticQ::operator()(double x, double y) const {
    const double dx = x - 2.0 * p_.drive / p_.kappa;
    return std::exp(-dx * dx) / kPi * z_average(y, rule_);
}

double analytic_q_integral(double x, double y, const BistableParams& params, int order) {
    return AnalyticQ(params, order)(x, y);
}

double analytic_q_bistable(double x, double y, const BistableParams& params, int order) {
    if (!(params.gamma_s > 0.0)) throw DomainError("analytic Q needs gamma_s > 0");
    if (params.gamma_s >= 2.0 * params.kappa)
        throw DomainError("gamma_s >= 2 kappa is outside the bistable regime");
    return analytic_q_integral(x, y, params, order);
}

std::vector<SteadyAmplitude> steady_amplitudes(int n_emitters, double gbar, double kappa, double drive, double l) {
    if (n_emitters < 1) throw DomainError("steady_amplitudes needs N >= 1");
    if (!(kappa > 0.0)) throw DomainError("steady_amplitudes needs kappa > 0");
    if (l < 0.0) l = n_emitters / 2.0;
    if (l > n_emitters / 2.0 || std::abs(2.0 * l - std::round(2.0 * l)) > 1e-12 ||
        std::fmod(std::round(2.0 * l) - n_emitters, 2.0) != 0.0)
        throw DomainError("steady_amplitudes: l must be N/2, N/2 - 1, ... >= 0");
    std::vector<SteadyAmplitude> out;
    const int count = static_cast<int>(std::round(2.0 * l)) + 1;
    for (int k = 0; k < count; ++k) {
        SteadyAmplitude a;
        a.l = l;
        a.m = -l + k;
        const double ratio = a.m * gbar / drive;
        a.defined = drive > 0.0 && std::abs(a.m * gbar) <= drive;
        if (a.defined) {
            a.f = std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
            a.alpha = 2.0 * a.f * Complex(drive * a.f, a.m * gbar) / kappa;
        }
        out.push_back(a);
    }
    return out;
}

std::vector<PeakMatch> match_peaks(std::span<const QPeak> peaks, std::span<const SteadyAmplitude> predicted,
                                   double tolerance) {
    std::vector<PeakMatch> out(predicted.size());
    struct Pair {
        double d;
        std::size_t i, j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        out[i].predicted = predicted[i];
        out[i].distance = std::numeric_limits<double>::infinity();
        if (!predicted[i].defined) continue;
        for (std::size_t j = 0; j < peaks.size(); ++j)
            pairs.push_back({std::abs(Complex(peaks[j].x, peaks[j].y) - predicted[i].alpha), i, j});
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
    std::vector<bool> peak_used(peaks.size(), false), done(predicted.size(), false);
    for (const auto& p : pairs) {
        if (done[p.i] || peak_used[p.j]) continue;
        done[p.i] = peak_used[p.j] = true;
        out[p.i].peak = peaks[p.j];
        out[p.i].distance = p.d;
        out[p.i].matched = p.d <= tolerance;
    }
    // Predictions left without a peak report the distance to the nearest one.
    for (const auto& p : pairs)
        if (!done[p.i] && p.d < out[p.i].distance) out[p.i].distance = p.d;
    return out;
}

DrivenQResult driven_q(const SystemSpec& spec_in, const DrivenQOptions& opt) {
    spec_in.validate();
    if (!(spec_in.drive > 0.0)) throw ConfigError("driven_q needs a positive drive");
    DrivenQResult res;
    res.predicted = steady_amplitudes(spec_in.n_qubits, spec_in.mean_coupling(), spec_in.kappa, spec_in.drive);

    double re_lo = std::numeric_limits<double>::infinity(), re_hi = -re_lo;
    double im_lo = re_lo, im_hi = -re_lo;
    for (const auto& a : res.predicted) {
        if (!a.defined) continue;
        re_lo = std::min(re_lo, a.alpha.real());
        re_hi = std::max(re_hi, a.alpha.real());
        im_lo = std::min(im_lo, a.alpha.imag());
        im_hi = std::max(im_hi, a.alpha.imag());
    }
    if (!std::isfinite(re_lo)) {
        // Below every threshold: fall back to the empty-cavity amplitude.
        re_lo = re_hi = 2.0 * spec_in.drive / spec_in.kappa;
        im_lo = im_hi = 0.0;
    }
    res.displacement = opt.displacement ? *opt.displacement : Complex(0.5 * (re_lo + re_hi), 0.0);

    SystemSpec spec = spec_in;
    if (opt.auto_truncation) {
        double r_max = 0.0;
        for (const auto& a : res.predicted)
            if (a.defined) r_max = std::max(r_max, std::abs(a.alpha - res.displacement));
        const auto rule = static_cast<Index>(std::ceil((r_max + 5.0) * (r_max + 5.0)));
        spec.n_max = std::max<Index>(2, std::min(rule, opt.truncation_cap));
    }
    res.truncation = spec.n_max;

    const LindbladModel model = build_model(spec, res.displacement);
    const Liouvillian l = liouvillian(model);
    SteadyStateResult ss = steady_state(l, opt.steady);
    res.steady = ss.report;
    res.diagnostics = ss.state.diagnostics();
    const DensityState field = partial_trace_field(ss.state);
    res.top_fock = top_fock_population(field);

    GridSpec grid;
    grid.spacing = opt.spacing;
    grid.x_min = std::floor((re_lo - opt.margin) / opt.spacing) * opt.spacing;
    grid.x_max = std::ceil((re_hi + opt.margin) / opt.spacing) * opt.spacing;
    grid.y_min = std::floor((im_lo - opt.margin) / opt.spacing) * opt.spacing;
    grid.y_max = std::ceil((im_hi + opt.margin) / opt.spacing) * opt.spacing;
    res.grid = q_function(field, grid, opt.min_prominence, opt.top_fock_limit);
    res.matches = match_peaks(res.grid.peaks, res.predicted, 1.5 * opt.spacing);
    return res;
}

std::vector<SweepPoint> peak_sweep(const SystemSpec& base, std::span<const double> drives,
                                   const DrivenQOptions& options, int jobs) {
    std::vector<SweepPoint> out(drives.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < drives.size(); k = next++) {
            SystemSpec spec = base;
            spec.drive = drives[k];
            SweepPoint pt;
            pt.drive = drives[k];
            pt.result = driven_q(spec, options);
            for (const auto& m : pt.result.matches)
                if (m.predicted.defined) pt.distance = std::max(pt.distance, m.distance);
            out[k] = std::move(pt);
        }
    };
    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(drives.size())));
    std::vector<std::future<void>> futures;
    for (int t = 0; t < n_threads; ++t) futures.push_back(std::async(std::launch::async, worker));
    for (auto& f : futures) f.get();
    return out;
}

}  // namespace dicke
