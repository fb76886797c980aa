#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dicke/density.hpp"
#include "dicke/liouvillian.hpp"
#include "dicke/ode.hpp"

namespace dicke {

enum class Integrator {
    RungeKutta,  // adaptive Dormand-Prince 5(4)
    Krylov,      // Arnoldi approximation of exp(hL) with adaptive sub-steps
};

struct EvolveOptions {
    Integrator integrator = Integrator::RungeKutta;
    double rtol = 1e-8;
    double atol = 1e-10;
    int krylov_dim = 30;
    long max_steps = 10'000'000;
    /// Every reported state must satisfy these bounds or evolve throws.
    PhysicalityTolerance physicality;
    /// Eigenvalue checks cost O(D^3) per output; disable only for speed-critical sweeps.
    bool check_min_eigenvalue = true;
};

/// Worst-case diagnostics over all reported states.
struct EvolutionReport {
    double max_trace_defect = 0.0;
    double max_hermiticity_defect = 0.0;
    double min_eigenvalue = 1.0;
    IntegrationStats stats;
};

using StateObserver = std::function<void(std::size_t index, double t, const DensityState& rho)>;

/// Integrates rho' = L rho from t = 0 and reports the state at each time in
/// `times` (non-decreasing, starting at or after 0).
EvolutionReport evolve(const Liouvillian& l, const DensityState& rho0, std::span<const double> times,
                       const EvolveOptions& options, const StateObserver& observer);

std::vector<DensityState> evolve(const Liouvillian& l, const DensityState& rho0,
                                 std::span<const double> times, const EvolveOptions& options = {});

/// exp(t A) v by restarted Arnoldi with local error control. Exposed for testing.
Vector krylov_expmv(const SparseMatrix& a, const Vector& v, double t, int krylov_dim, double tol,
                    IntegrationStats* stats = nullptr);

}  // namespace dicke
