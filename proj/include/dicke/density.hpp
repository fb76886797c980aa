#pragma once

#include "dicke/operators.hpp"

namespace dicke {

/// Validity metadata attached to every density matrix.
struct StateDiagnostics {
    double trace_defect = 0.0;        // |tr(rho) - 1|
    double hermiticity_defect = 0.0;  // max |rho - rho^dagger|
    double min_eigenvalue = 0.0;
};

/// Acceptance thresholds for a physical state.
struct PhysicalityTolerance {
    double trace = 1e-8;
    double hermiticity = 1e-8;
    double min_eigenvalue = -1e-7;
};

/// Density matrix with subsystem dims and its diagnostics.
///
/// `displacement` records that the cavity factor is expressed in a frame
/// displaced by that coherent amplitude: the lab-frame state is
/// D(beta) rho D(beta)^dagger. It is zero unless a displaced-frame model
/// produced the state.
class DensityState {
public:
    DensityState() = default;
    DensityState(DenseMatrix matrix, Dims dims, Complex displacement = 0.0);

    static DensityState from_pure(const StateVector& psi, Complex displacement = 0.0);

    const DenseMatrix& matrix() const { return matrix_; }
    const Dims& dims() const { return dims_; }
    Complex displacement() const { return displacement_; }
    const StateDiagnostics& diagnostics() const { return diag_; }
    Index side() const { return matrix_.rows(); }

    bool is_physical(const PhysicalityTolerance& tol = {}) const;
    /// Throws NumericalError naming the violated bound.
    void require_physical(const PhysicalityTolerance& tol = {}) const;

private:
    DenseMatrix matrix_;
    Dims dims_;
    Complex displacement_ = 0.0;
    StateDiagnostics diag_;
};

StateDiagnostics diagnose(const DenseMatrix& rho);

/// Reduced state of the cavity (first subsystem). Trace preserving.
DensityState partial_trace_field(const DensityState& rho);

/// tr(O rho), evaluated in the frame the state is stored in.
Complex expectation(const DensityState& rho, const Operator& op);

/// <psi|rho|psi> for a pure reference state.
double fidelity(const DensityState& rho, const StateVector& psi);

/// Population of the highest Fock level of the cavity factor.
double top_fock_population(const DensityState& rho);

/// Column-stacked vec(rho) and its inverse.
Vector vectorize(const DenseMatrix& rho);
DenseMatrix unvectorize(const Vector& v, Index side);

}  // namespace dicke
