#pragma once

#include <string>

#include "dicke/density.hpp"
#include "dicke/liouvillian.hpp"

namespace dicke {

struct SteadyStateOptions {
    /// Bordered systems with at most this many rows use sparse LU; larger ones
    /// use preconditioned BiCGSTAB.
    Index direct_row_limit = 100'000;
    /// Solve inside the emitter-permutation-invariant subspace when the model allows it.
    bool use_symmetry = true;
    double iterative_tolerance = 1e-13;
    long max_iterations = 50'000;
    /// Accept only when ||L vec(rho)|| <= residual_tolerance * ||L||_F.
    double residual_tolerance = 1e-9;
    /// Superoperators up to this side get a dense SVD uniqueness check.
    Index uniqueness_check_limit = 1024;
    PhysicalityTolerance physicality;
};

enum class Uniqueness { Verified, Assumed };

struct SteadyStateReport {
    std::string method;           // "sparse-lu" or "bicgstab"
    bool symmetry_reduced = false;
    Index system_rows = 0;        // rows of the bordered system actually solved
    double residual = 0.0;        // ||L vec(rho)||_2
    double relative_residual = 0.0;
    Uniqueness uniqueness = Uniqueness::Assumed;
    double second_singular_value = 0.0;  // relative to the largest; 0 when not checked
    long iterations = 0;
};

struct SteadyStateResult {
    DensityState state;
    SteadyStateReport report;
};

/// Null vector of L normalized to unit trace, from the bordered system
/// [L  w^T; w  0] [x; lambda] = [0; 1] with w the trace functional.
///
/// Throws NumericalError when the solve does not converge or the residual
/// bound fails, DomainError when the null space is verified to be degenerate.
SteadyStateResult steady_state(const Liouvillian& l, const SteadyStateOptions& options = {});

}  // namespace dicke
