#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dicke/evolve.hpp"
#include "dicke/model.hpp"

namespace dicke {

/// Rates of the field-eliminated emitter dynamics.
struct EffectiveRates {
    double gbar = 0.0;   // mean coupling
    Complex Gamma;       // kappa / 2 + i delta_r
    double gamma = 0.0;  // kappa gbar^2 / |Gamma|^2
    double R1 = 0.0;     // gamma at delta_r = 0, i.e. 4 gbar^2 / kappa
};

/// Throws ConfigError when kappa <= 0.
EffectiveRates effective_rate(const SystemSpec& spec);

enum class LadderMethod { Ode, ClosedForm };

/// Populations P(n, tau) of the symmetric Dicke ladder, n photons emitted,
/// starting from full excitation.
struct DickeLadderSolution {
    int n_emitters = 0;
    std::vector<double> tau;
    Eigen::MatrixXd populations;         // rows: tau samples, columns: n = 0..N
    std::vector<double> intensity;       // flux form, sum_n (N - n)(n + 1) P(n)
    std::vector<double> intensity_diff;  // d/dtau sum_n n P(n), finite differences
    LadderMethod method = LadderMethod::Ode;
};

/// Adaptive integration of the ladder rate equations.
DickeLadderSolution dicke_ladder_evolve(int n_emitters, std::span<const double> tau, double rtol = 1e-12);

/// Residue inversion of the Laplace-domain solution, double poles included.
/// Throws DomainError for N > 5.
DickeLadderSolution dicke_ladder_closed_form(int n_emitters, std::span<const double> tau);

/// Pole of Q(n, s) at s = -rate.
struct LadderPole {
    double rate = 0.0;
    int multiplicity = 1;
};
/// Distinct poles of Q(n, s) for the N-emitter ladder, ascending in rate.
std::vector<LadderPole> ladder_poles(int n_emitters, int n);

/// Fills both intensity vectors of `sol` from its populations.
void intensity_from_populations(DickeLadderSolution& sol);

/// The printed closed forms for N = 3, 4, 5; other N throw DomainError.
double analytic_intensity(int n_emitters, double tau);

struct SuperradianceCheck {
    bool superradiant = false;
    double i_max = 0.0;
    double tau_max = 0.0;
};

/// Locates the intensity maximum (three-point parabolic refinement) and
/// compares it with N.
SuperradianceCheck superradiance_check(std::span<const double> tau, std::span<const double> intensity,
                                       int n_emitters);

struct FullMeIntensity {
    std::vector<double> tau;
    std::vector<double> intensity;         // kappa <a^dag a> / gamma
    std::vector<double> upper_population;  // qutrit f levels, zero for qubits
    EffectiveRates rates;
    double max_upper_population = 0.0;
    double max_top_fock = 0.0;
    bool bad_cavity_warning = false;    // kappa / gbar < 10
    EvolutionReport report;
};

struct FullMeOptions {
    EvolveOptions evolve;
    /// Largest tolerated population of the highest Fock level.
    double top_fock_limit = 1e-6;
};

/// Full master-equation evolution from |0> (x) |e...e>, intensity reported
/// against tau = gamma t. Throws TruncationError when the top Fock level
/// population exceeds the limit.
FullMeIntensity full_me_intensity(const SystemSpec& spec, std::span<const double> tau,
                                  const FullMeOptions& options = {});

/// Largest |signal - moving average| over samples whose centred window of
/// `window` samples fits inside the signal.
double high_frequency_residual(std::span<const double> signal, std::size_t window);

/// Weights of the derivative at x0 from the nodes x (Fornberg).
std::vector<double> finite_difference_weights(double x0, std::span<const double> x);

/// Uniform grid 0, step, ..., up to and including `end` (rounded to the nearest step count).
std::vector<double> uniform_grid(double end, double step);

}  // namespace dicke
