#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dicke/density.hpp"
#include "dicke/gauss_jacobi.hpp"
#include "dicke/model.hpp"
#include "dicke/steady_state.hpp"

namespace dicke {

/// Rectangular sampling of the complex plane, alpha = x + i y.
struct GridSpec {
    double x_min = -5.0, x_max = 5.0;
    double y_min = -5.0, y_max = 5.0;
    double spacing = 0.1;
};

struct QPeak {
    double x = 0.0;
    double y = 0.0;
    double q_value = 0.0;
};

struct PhaseSpaceGrid {
    std::vector<double> xs;
    std::vector<double> ys;
    Eigen::MatrixXd values;  // values(iy, ix) = Q(xs[ix] + i ys[iy])
    double spacing = 0.0;
    std::vector<QPeak> peaks;

    /// sum Q * spacing^2.
    double riemann_sum() const;
};

std::vector<double> grid_axis(double lo, double hi, double spacing);

/// Peaks of the Husimi function of a cavity state, detected with
/// `min_prominence`. Throws TruncationError when the top Fock level holds
/// more than `top_fock_limit`, DimensionError unless the state is cavity-only.
PhaseSpaceGrid q_function(const DensityState& rho_field, const GridSpec& grid, double min_prominence = 0.02,
                          double top_fock_limit = 1e-6);

/// Strict 8-neighbour interior maxima at or above min_prominence * max(Q),
/// refined by a least-squares quadratic over the 3 x 3 neighbourhood.
/// Sorted by decreasing Q.
std::vector<QPeak> find_q_peaks(const PhaseSpaceGrid& grid, double min_prominence);

struct BistableParams {
    double g = 0.0;
    double kappa = 0.0;
    double gamma_s = 0.0;
    double drive = 0.0;
};

/// Closed-form steady Q-function of the strongly driven single qubit,
/// Q(x + iy) = e^{-(x - 2E/kappa)^2} / pi * <e^{-(g z / kappa - y)^2}>,
/// the average taken over z in [-1, 1] with density proportional to
/// (1 - z^2)^{p - 1}, p = gamma_s / (2 kappa), by Gauss-Jacobi quadrature.
class AnalyticQ {
public:
    /// order 0 doubles from 32 nodes until values across the relevant y range
    /// stop changing (relative 1e-12). Requires gamma_s > 0 and kappa > 0 only.
    explicit AnalyticQ(const BistableParams& params, int order = 0);

    double operator()(double x, double y) const;
    int order() const { return static_cast<int>(rule_.nodes.size()); }

private:
    double z_average(double y, const QuadratureRule& rule) const;

    BistableParams p_;
    QuadratureRule rule_;  // weights normalized to sum 1
};

/// Throws DomainError outside the bistable regime 0 < gamma_s < 2 kappa.
double analytic_q_bistable(double x, double y, const BistableParams& params, int order = 0);
/// Same expression without the regime check (gamma_s > 0 still required).
double analytic_q_integral(double x, double y, const BistableParams& params, int order = 0);

struct SteadyAmplitude {
    double l = 0.0;
    double m = 0.0;
    double f = 0.0;
    Complex alpha;
    bool defined = false;  // false when E < |m| gbar
};

/// alpha^(l, m) = 2 f_m (E f_m + i m gbar) / kappa for m = -l..l,
/// f_m = sqrt(1 - (m gbar / E)^2). l < 0 selects the symmetric sector N / 2.
std::vector<SteadyAmplitude> steady_amplitudes(int n_emitters, double gbar, double kappa, double drive,
                                               double l = -1.0);

struct PeakMatch {
    SteadyAmplitude predicted;
    std::optional<QPeak> peak;
    double distance = 0.0;  // |peak - alpha|, infinite when no peak is left
    bool matched = false;
};

/// Assigns detected peaks to predicted amplitudes (closest pairs first,
/// each peak used once); a pair matches within `tolerance`.
std::vector<PeakMatch> match_peaks(std::span<const QPeak> peaks, std::span<const SteadyAmplitude> predicted,
                                   double tolerance);

struct DrivenQOptions {
    /// Cavity frame displacement; empty picks the centre of the predicted amplitudes.
    std::optional<Complex> displacement;
    /// Fock truncation is min(ceil((r_max + 5)^2), truncation_cap) with r_max the largest
    /// predicted amplitude distance from the displacement. Otherwise spec.n_max is used.
    bool auto_truncation = true;
    Index truncation_cap = 40;
    double spacing = 0.1;
    double margin = 3.0;
    double min_prominence = 0.02;
    double top_fock_limit = 1e-6;
    SteadyStateOptions steady;
};

struct DrivenQResult {
    PhaseSpaceGrid grid;
    std::vector<SteadyAmplitude> predicted;
    std::vector<PeakMatch> matches;
    Complex displacement;
    Index truncation = 0;
    SteadyStateReport steady;
    StateDiagnostics diagnostics;
    double top_fock = 0.0;
};

/// Steady state of the driven model, its cavity Q-function on a grid
/// around the predicted amplitudes, and the peak assignment.
DrivenQResult driven_q(const SystemSpec& spec, const DrivenQOptions& options = {});

struct SweepPoint {
    double drive = 0.0;
    DrivenQResult result;
    /// Largest matched-or-not distance over the defined predictions.
    double distance = 0.0;
};

/// driven_q for each drive value, `jobs` points at a time.
std::vector<SweepPoint> peak_sweep(const SystemSpec& base, std::span<const double> drives,
                                   const DrivenQOptions& options = {}, int jobs = 1);

}  // namespace dicke
