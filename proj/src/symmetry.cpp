#include "dicke/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dicke/errors.hpp"

namespace dicke {

PermutationReduction::PermutationReduction(const Dims& dims) {
    if (dims.size() < 2) throw DimensionError("permutation reduction needs at least one emitter");
    const Index nf = dims.front();
    const Index d = dims[1];
    if (std::any_of(dims.begin() + 1, dims.end(), [&](Index x) { return x != d; }))
        throw DimensionError("permutation reduction needs identical emitter dimensions");
    const auto n_emit = dims.size() - 1;
    const Index q = product(Dims(dims.begin() + 1, dims.end()));
    const Index hilbert = nf * q;

    // Orbit label of every emitter pair (s, t) = sorted multiset of letters s_k * d + t_k.
    std::map<std::vector<Index>, Index> label;
    std::vector<Index> orbit_of(static_cast<std::size_t>(q * q));
    std::vector<Index> orbit_size;
    std::vector<Index> letters(n_emit);
    for (Index s = 0; s < q; ++s) {
        for (Index t = 0; t < q; ++t) {
            Index ss = s, tt = t;
            for (std::size_t k = n_emit; k-- > 0;) {
                letters[k] = (ss % d) * d + (tt % d);
                ss /= d;
                tt /= d;
            }
            std::vector<Index> key = letters;
            std::sort(key.begin(), key.end());
            auto [it, inserted] = label.try_emplace(key, static_cast<Index>(orbit_size.size()));
            if (inserted) orbit_size.push_back(0);
            ++orbit_size[static_cast<std::size_t>(it->second)];
            orbit_of[static_cast<std::size_t>(s * q + t)] = it->second;
        }
    }
    orbits_ = static_cast<Index>(orbit_size.size());

    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(hilbert * hilbert));
    for (Index np = 0; np < nf; ++np)
        for (Index t = 0; t < q; ++t)
            for (Index n = 0; n < nf; ++n)
                for (Index s = 0; s < q; ++s) {
                    const Index o = orbit_of[static_cast<std::size_t>(s * q + t)];
                    const Index row = (n * q + s) + hilbert * (np * q + t);
                    const Index col = (np * nf + n) * orbits_ + o;
                    trip.emplace_back(row, col,
                                      1.0 / std::sqrt(static_cast<double>(orbit_size[static_cast<std::size_t>(o)])));
                }
    v_.resize(hilbert * hilbert, nf * nf * orbits_);
    v_.setFromTriplets(trip.begin(), trip.end());
    v_.makeCompressed();
}

SparseMatrix PermutationReduction::reduce(const SparseMatrix& superop) const {
    if (superop.rows() != full_dim()) throw DimensionError("reduce: superoperator size mismatch");
    SparseMatrix lv = superop * v_;
    SparseMatrix out = SparseMatrix(v_.transpose()) * lv;
    out.prune(Complex(0.0));
    return out;
}

double PermutationReduction::invariance_defect(const SparseMatrix& superop, const SparseMatrix& reduced) const {
    SparseMatrix diff = SparseMatrix(superop * v_) - SparseMatrix(v_ * reduced);
    double m = 0.0;
    for (Index k = 0; k < diff.nonZeros(); ++k) m = std::max(m, std::abs(diff.valuePtr()[k]));
    return m;
}

}  // namespace dicke
