#include "dicke/liouvillian.hpp"

#include <string>

#include "dicke/density.hpp"
#include "dicke/errors.hpp"

namespace dicke {

namespace {

using Triplet = Eigen::Triplet<Complex>;

// Appends the entries of (left (x) right) where one factor is the identity.
void push_identity_left(std::vector<Triplet>& t, const SparseMatrix& k, Index d) {
    // I (x) K: ((j, i), (j, k)) -> K(i, k)
    for (Index col = 0; col < k.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(k, col); it; ++it)
            for (Index j = 0; j < d; ++j) t.emplace_back(it.row() + d * j, it.col() + d * j, it.value());
}

void push_identity_right(std::vector<Triplet>& t, const SparseMatrix& k, Index d) {
    // K (x) I: ((j, i), (l, i)) -> K(j, l)
    for (Index col = 0; col < k.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(k, col); it; ++it)
            for (Index i = 0; i < d; ++i) t.emplace_back(i + d * it.row(), i + d * it.col(), it.value());
}

}  // namespace

Liouvillian::Liouvillian(SparseMatrix matrix, const LindbladModel& model)
    : matrix_(std::move(matrix)),
      hilbert_dim_(model.dimension()),
      dims_(model.dims),
      displacement_(model.field_displacement),
      symmetric_(model.permutation_symmetric) {
    matrix_.makeCompressed();
    norm_ = matrix_.norm();
}

DenseMatrix Liouvillian::apply(const DenseMatrix& rho) const {
    return unvectorize(matrix_ * vectorize(rho), hilbert_dim_);
}

Liouvillian liouvillian(const LindbladModel& model, const LiouvillianOptions& options) {
    model.validate();
    const Index d = model.dimension();
    if (d * d > options.max_superoperator_dim)
        throw ResourceError("Liouvillian side " + std::to_string(d * d) + " exceeds cap " +
                            std::to_string(options.max_superoperator_dim));

    // Effective generator K = -iH - sum r A^dag A; L = I(x)K + conj(K)(x)I + sum 2r conj(A)(x)A.
    SparseMatrix k = Complex(0.0, -1.0) * model.hamiltonian.sparse();
    for (const auto& c : model.channels) {
        const SparseMatrix a = c.op.sparse();
        k -= c.rate * SparseMatrix(a.adjoint() * a);
    }
    k.prune(Complex(0.0));

    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(2 * k.nonZeros() * d));
    push_identity_left(t, k, d);
    push_identity_right(t, SparseMatrix(k.conjugate()), d);
    for (const auto& c : model.channels) {
        const SparseMatrix a = c.op.sparse();
        const SparseMatrix jump = kron_sparse(SparseMatrix(a.conjugate()), a);
        for (Index col = 0; col < jump.outerSize(); ++col)
            for (SparseMatrix::InnerIterator it(jump, col); it; ++it)
                t.emplace_back(it.row(), it.col(), 2.0 * c.rate * it.value());
    }
    SparseMatrix l(d * d, d * d);
    l.setFromTriplets(t.begin(), t.end());
    l.prune(Complex(0.0));
    return {std::move(l), model};
}

}  // namespace dicke
