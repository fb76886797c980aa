#include "dicke/evolve.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

void check_times(std::span<const double> times) {
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || times[k] < 0.0)
            throw DomainError("evolve: output times must be finite and >= 0");
        if (k > 0 && times[k] < times[k - 1]) throw DomainError("evolve: output times must be non-decreasing");
    }
}

class Reporter {
public:
    Reporter(const Liouvillian& l, const EvolveOptions& opt, const StateObserver& obs, EvolutionReport& rep)
        : l_(l), opt_(opt), obs_(obs), rep_(rep) {}

    void operator()(std::size_t k, double t, const Vector& y) {
        DensityState rho(unvectorize(y, l_.hilbert_dim()), l_.dims(), l_.field_displacement());
        const auto& d = rho.diagnostics();
        rep_.max_trace_defect = std::max(rep_.max_trace_defect, d.trace_defect);
        rep_.max_hermiticity_defect = std::max(rep_.max_hermiticity_defect, d.hermiticity_defect);
        rep_.min_eigenvalue = std::min(rep_.min_eigenvalue, d.min_eigenvalue);
        PhysicalityTolerance tol = opt_.physicality;
        if (!opt_.check_min_eigenvalue) tol.min_eigenvalue = -std::numeric_limits<double>::infinity();
        if (!rho.is_physical(tol)) {
            std::ostringstream os;
            os << "state left the physical set at t = " << t << " (trace defect " << d.trace_defect
               << ", hermiticity defect " << d.hermiticity_defect << ", min eigenvalue "
               << d.min_eigenvalue << ")";
            throw NumericalError(os.str());
        }
        if (obs_) obs_(k, t, rho);
    }

private:
    const Liouvillian& l_;
    const EvolveOptions& opt_;
    const StateObserver& obs_;
    EvolutionReport& rep_;
};

}  // namespace

Vector krylov_expmv(const SparseMatrix& a, const Vector& v, double t, int krylov_dim, double tol,
                    IntegrationStats* stats) {
    const Index n = v.size();
    const int m = std::max(2, std::min<int>(krylov_dim, static_cast<int>(n)));
    Vector w = v;
    if (t <= 0.0) return w;
    double anorm = 0.0;
    for (Index k = 0; k < a.outerSize(); ++k) {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
        anorm = std::max(anorm, col);
    }
    const double breakdown_tol = 1e-12 * std::max(anorm, 1.0);

    double t_now = 0.0;
    double h = std::min(t, 1.0 / std::max(anorm, 1e-300) * 10.0);
    DenseMatrix basis(n, m + 1);
    while (t_now < t) {
        const double beta = w.norm();
        if (beta == 0.0) return w;

        DenseMatrix hess = DenseMatrix::Zero(m + 2, m + 2);
        basis.col(0) = w / beta;
        int used = m;
        bool happy = false;
        for (int j = 0; j < m; ++j) {
            Vector p = a * basis.col(j);
            if (stats) ++stats->rhs_evaluations;
            for (int i = 0; i <= j; ++i) {
                hess(i, j) = basis.col(i).dot(p);
                p -= hess(i, j) * basis.col(i);
            }
            const double s = p.norm();
            if (s < breakdown_tol) {
                used = j + 1;
                happy = true;
                break;
            }
            hess(j + 1, j) = s;
            basis.col(j + 1) = p / s;
        }
        double avnorm = 0.0;
        if (!happy) {
            hess(m + 1, m) = 1.0;
            avnorm = (a * basis.col(m)).norm();
        }

        while (true) {
            const double step = std::min(h, t - t_now);
            const int mx = happy ? used : m + 2;
            const DenseMatrix f = (step * hess.topLeftCorner(mx, mx)).exp();
            double err = 0.0;
            if (!happy) {
                const double err1 = std::abs(beta * f(m, 0));
                const double err2 = std::abs(beta * f(m + 1, 0) * avnorm);
                if (err1 > 10.0 * err2) err = err2;
                else if (err1 > err2) err = err1 * err2 / (err1 - err2);
                else err = err1;
            }
            const double allowed = tol * beta * std::max(step / t, 1e-3);
            if (err <= allowed || step <= 1e-14 * t) {
                const int keep = happy ? used : m + 1;
                w = basis.leftCols(keep) * (beta * f.col(0).head(keep));
                t_now += step;
                if (stats) ++stats->accepted;
                h = happy ? t - t_now
                          : step * std::min(5.0, 0.9 * std::pow(allowed / std::max(err, 1e-300), 1.0 / m));
                break;
            }
            if (stats) ++stats->rejected;
            h = step * std::max(0.2, 0.9 * std::pow(allowed / err, 1.0 / m));
        }
        if (!std::isfinite(w.norm())) {
            std::ostringstream os;
            os << "Krylov propagator produced non-finite values; last good time " << t_now;
            throw NumericalError(os.str());
        }
    }
    return w;
}

EvolutionReport evolve(const Liouvillian& l, const DensityState& rho0, std::span<const double> times,
                       const EvolveOptions& options, const StateObserver& observer) {
    if (rho0.dims() != l.dims()) throw DimensionError("evolve: initial state dims do not match the model");
    rho0.require_physical(options.physicality);
    check_times(times);

    EvolutionReport report;
    Reporter report_state(l, options, observer, report);
    const SparseMatrix& mat = l.matrix();
    Vector y = vectorize(rho0.matrix());

    if (options.integrator == Integrator::RungeKutta) {
        StepControl ctl;
        ctl.rtol = options.rtol;
        ctl.atol = options.atol;
        ctl.max_steps = options.max_steps;
        auto rhs = [&](double, const Vector& x, Vector& dx) { dx.noalias() = mat * x; };
        report.stats = integrate_dopri<Vector>(rhs, std::move(y), times, ctl, report_state);
        return report;
    }

    double t = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] > t) {
            y = krylov_expmv(mat, y, times[k] - t, options.krylov_dim, options.rtol, &report.stats);
            t = times[k];
        }
        report_state(k, t, y);
    }
    return report;
}

std::vector<DensityState> evolve(const Liouvillian& l, const DensityState& rho0,
                                 std::span<const double> times, const EvolveOptions& options) {
    std::vector<DensityState> out(times.size());
    evolve(l, rho0, times, options, [&](std::size_t k, double, const DensityState& rho) { out[k] = rho; });
    return out;
}

}  // namespace dicke
