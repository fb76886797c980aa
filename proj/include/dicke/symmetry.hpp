#pragma once

#include "dicke/operators.hpp"

namespace dicke {

/// Restriction of column-stacked density matrices to the subspace invariant
/// under simultaneous permutations of identical emitters.
///
/// For dims {n_field, d, d, ..., d} a basis element is the normalized sum of
/// |n, s><n', t| over one orbit of emitter pairs (s, t); an orbit is fixed by
/// the multiset of per-emitter letters (s_k, t_k). With N emitters this cuts
/// the emitter-operator count from d^(2N) to C(d^2 + N - 1, N).
class PermutationReduction {
public:
    explicit PermutationReduction(const Dims& dims);

    /// Isometry V (D^2 x R) with orthonormal columns spanning the invariant subspace.
    const SparseMatrix& isometry() const { return v_; }
    Index full_dim() const { return v_.rows(); }
    Index reduced_dim() const { return v_.cols(); }
    Index orbit_count() const { return orbits_; }

    /// V^T A V.
    SparseMatrix reduce(const SparseMatrix& superop) const;
    /// max |A V - V (V^T A V)|; zero when A commutes with emitter permutations.
    double invariance_defect(const SparseMatrix& superop, const SparseMatrix& reduced) const;

    Vector lift(const Vector& reduced) const { return v_ * reduced; }
    Vector restrict(const Vector& full) const { return v_.transpose() * full; }

private:
    SparseMatrix v_;
    Index orbits_ = 0;
};

}  // namespace dicke
