#include "dicke/steady_state.hpp"

#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "dicke/errors.hpp"
#include "dicke/symmetry.hpp"

namespace dicke {

namespace {

using Triplet = Eigen::Triplet<Complex>;

SparseMatrix trace_row(Index hilbert) {
    SparseMatrix w(1, hilbert * hilbert);
    std::vector<Triplet> t;
    for (Index i = 0; i < hilbert; ++i) t.emplace_back(0, i + hilbert * i, 1.0);
    w.setFromTriplets(t.begin(), t.end());
    return w;
}

SparseMatrix bordered(const SparseMatrix& l, const SparseMatrix& w) {
    const Index n = l.rows();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(l.nonZeros() + 2 * w.nonZeros()));
    for (Index c = 0; c < l.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(l, c); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (Index c = 0; c < w.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(w, c); it; ++it) {
            t.emplace_back(n, it.col(), it.value());
            t.emplace_back(it.col(), n, std::conj(it.value()));
        }
    SparseMatrix m(n + 1, n + 1);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

Vector solve_bordered(const SparseMatrix& m, const Vector& guess, const SteadyStateOptions& opt,
                      SteadyStateReport& rep) {
    Vector rhs = Vector::Zero(m.rows());
    rhs(m.rows() - 1) = 1.0;
    rep.system_rows = m.rows();
    if (m.rows() <= opt.direct_row_limit) {
        rep.method = "sparse-lu";
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(m);
        lu.factorize(m);
        if (lu.info() != Eigen::Success)
            throw NumericalError("steady state: sparse LU factorization failed: " + lu.lastErrorMessage());
        Vector x = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw NumericalError("steady state: sparse LU solve failed");
        return x;
    }
    rep.method = "bicgstab";
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<Complex>> solver;
    solver.setTolerance(opt.iterative_tolerance);
    solver.setMaxIterations(opt.max_iterations);
    solver.preconditioner().setDroptol(1e-8);
    solver.preconditioner().setFillfactor(20);
    solver.compute(m);
    // A zero start breaks down at once: the first search direction is the
    // border column, which is orthogonal to the initial residual.
    Vector x0 = Vector::Zero(m.rows());
    x0.head(guess.size()) = guess;
    Vector x = solver.solveWithGuess(rhs, x0);
    rep.iterations = solver.iterations();
    if (solver.info() != Eigen::Success) {
        std::ostringstream os;
        os << "steady state: BiCGSTAB did not converge after " << solver.iterations()
           << " iterations (estimated relative residual " << solver.error() << ")";
        throw NumericalError(os.str());
    }
    return x;
}

void check_uniqueness(const Liouvillian& l, const SteadyStateOptions& opt, SteadyStateReport& rep) {
    if (l.matrix().rows() > opt.uniqueness_check_limit) return;
    Eigen::BDCSVD<DenseMatrix> svd(DenseMatrix(l.matrix()));
    const auto& s = svd.singularValues();  // descending
    const Index n = s.size();
    if (n < 2 || s(0) == 0.0) return;
    rep.second_singular_value = s(n - 2) / s(0);
    if (rep.second_singular_value < 1e-10)
        throw DomainError("steady state is not unique: two near-zero singular values of L");
    rep.uniqueness = Uniqueness::Verified;
}

}  // namespace

SteadyStateResult steady_state(const Liouvillian& l, const SteadyStateOptions& options) {
    SteadyStateReport rep;
    check_uniqueness(l, options, rep);

    const Index d = l.hilbert_dim();
    const SparseMatrix w = trace_row(d);
    const Vector mixed = vectorize(DenseMatrix::Identity(d, d) / static_cast<double>(d));
    Vector x;
    if (options.use_symmetry && l.permutation_symmetric() && l.dims().size() > 2) {
        const PermutationReduction red(l.dims());
        const SparseMatrix lr = red.reduce(l.matrix());
        const double defect = red.invariance_defect(l.matrix(), lr);
        if (defect > 1e-10 * std::max(1.0, l.norm()))
            throw NumericalError("steady state: Liouvillian is not permutation invariant (defect " +
                                 std::to_string(defect) + ")");
        const SparseMatrix wr = w * red.isometry();
        rep.symmetry_reduced = true;
        const Vector xr = solve_bordered(bordered(lr, wr), red.restrict(mixed), options, rep);
        x = red.lift(xr.head(lr.rows()));
    } else {
        x = solve_bordered(bordered(l.matrix(), w), mixed, options, rep).head(d * d);
    }

    DenseMatrix rho = unvectorize(x, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace();
    DensityState state(std::move(rho), l.dims(), l.field_displacement());

    rep.residual = (l.matrix() * vectorize(state.matrix())).norm();
    rep.relative_residual = rep.residual / std::max(l.norm(), 1e-300);
    if (rep.relative_residual > options.residual_tolerance) {
        std::ostringstream os;
        os << "steady state residual " << rep.residual << " exceeds " << options.residual_tolerance
           << " * ||L|| (relative " << rep.relative_residual << ")";
        throw NumericalError(os.str());
    }
    state.require_physical(options.physicality);
    return {std::move(state), rep};
}

}  // namespace dicke
