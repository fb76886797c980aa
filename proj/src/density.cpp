#include "dicke/density.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dicke/errors.hpp"

namespace dicke {

StateDiagnostics diagnose(const DenseMatrix& rho) {
    StateDiagnostics d;
    d.trace_defect = std::abs(rho.trace() - Complex(1.0));
    d.hermiticity_defect = rho.size() ? (rho - rho.adjoint()).cwiseAbs().maxCoeff() : 0.0;
    const DenseMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

DensityState::DensityState(DenseMatrix matrix, Dims dims, Complex displacement)
    : matrix_(std::move(matrix)), dims_(std::move(dims)), displacement_(displacement) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionError("density matrix must be square");
    if (dims_.empty() || product(dims_) != matrix_.rows())
        throw DimensionError("density matrix side does not match product of dims");
    diag_ = diagnose(matrix_);
}

DensityState DensityState::from_pure(const StateVector& psi, Complex displacement) {
    return {psi.amplitudes * psi.amplitudes.adjoint(), psi.dims, displacement};
}

bool DensityState::is_physical(const PhysicalityTolerance& tol) const {
    return diag_.trace_defect < tol.trace && diag_.hermiticity_defect < tol.hermiticity &&
           diag_.min_eigenvalue > tol.min_eigenvalue;
}

void DensityState::require_physical(const PhysicalityTolerance& tol) const {
    if (is_physical(tol)) return;
    std::ostringstream os;
    os << "unphysical density matrix: trace defect " << diag_.trace_defect
       << ", hermiticity defect " << diag_.hermiticity_defect << ", min eigenvalue "
       << diag_.min_eigenvalue;
    throw NumericalError(os.str());
}

DensityState partial_trace_field(const DensityState& rho) {
    const Index nf = rho.dims().front();
    const Index rest = rho.side() / nf;
    DenseMatrix out = DenseMatrix::Zero(nf, nf);
    const DenseMatrix& m = rho.matrix();
    for (Index j = 0; j < nf; ++j)
        for (Index i = 0; i < nf; ++i) out(i, j) = m.block(i * rest, j * rest, rest, rest).trace();
    return {std::move(out), Dims{nf}, rho.displacement()};
}

Complex expectation(const DensityState& rho, const Operator& op) {
    if (op.dims() != rho.dims()) throw DimensionError("expectation: operator and state dims differ");
    const DenseMatrix& m = rho.matrix();
    Complex acc = 0.0;
    if (op.is_sparse()) {
        const SparseMatrix s = op.sparse();
        for (Index j = 0; j < s.outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(s, j); it; ++it) acc += it.value() * m(it.col(), it.row());
    } else {
        acc = (op.dense().cwiseProduct(m.transpose())).sum();
    }
    return acc;
}

double fidelity(const DensityState& rho, const StateVector& psi) {
    if (psi.dims != rho.dims()) throw DimensionError("fidelity: state dims differ");
    return std::real(psi.amplitudes.dot(rho.matrix() * psi.amplitudes));
}

double top_fock_population(const DensityState& rho) {
    const Index nf = rho.dims().front();
    const Index rest = rho.side() / nf;
    return std::real(rho.matrix().block((nf - 1) * rest, (nf - 1) * rest, rest, rest).trace());
}

Vector vectorize(const DenseMatrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

DenseMatrix unvectorize(const Vector& v, Index side) {
    if (v.size() != side * side) throw DimensionError("unvectorize: length is not side^2");
    return Eigen::Map<const DenseMatrix>(v.data(), side, side);
}

}  // namespace dicke
