#include "dicke/operators.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

using Triplet = Eigen::Triplet<Complex>;

void check_dims(const Dims& dims, Index side) {
    if (dims.empty()) throw DimensionError("empty dimension list");
    for (Index d : dims)
        if (d < 1) throw DimensionError("subsystem dimension must be positive");
    if (product(dims) != side)
        throw DimensionError("product of dims " + std::to_string(product(dims)) +
                             " does not match matrix side " + std::to_string(side));
}

void check_same(const Operator& a, const Operator& b, const char* what) {
    if (a.dims() != b.dims())
        throw DimensionError(std::string("dims mismatch in ") + what);
}

}  // namespace

SparseMatrix kron_sparse(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
    for (Index ja = 0; ja < a.outerSize(); ++ja)
        for (SparseMatrix::InnerIterator ia(a, ja); ia; ++ia)
            for (Index jb = 0; jb < b.outerSize(); ++jb)
                for (SparseMatrix::InnerIterator ib(b, jb); ib; ++ib)
                    t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                   ia.value() * ib.value());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

namespace {

DenseMatrix dense_kron(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Dims concat(const Dims& a, const Dims& b) {
    Dims out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

Index product(const Dims& dims) {
    return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

Operator::Operator(DenseMatrix m, Dims dims) : m_(std::move(m)), dims_(std::move(dims)) {
    const auto& d = std::get<DenseMatrix>(m_);
    if (d.rows() != d.cols()) throw DimensionError("operator matrix must be square");
    check_dims(dims_, d.rows());
}

Operator::Operator(SparseMatrix m, Dims dims) : m_(std::move(m)), dims_(std::move(dims)) {
    auto& s = std::get<SparseMatrix>(m_);
    if (s.rows() != s.cols()) throw DimensionError("operator matrix must be square");
    check_dims(dims_, s.rows());
    s.makeCompressed();
}

Index Operator::side() const {
    return std::visit([](const auto& m) { return m.rows(); }, m_);
}

DenseMatrix Operator::dense() const {
    if (auto* d = std::get_if<DenseMatrix>(&m_)) return *d;
    return DenseMatrix(std::get<SparseMatrix>(m_));
}

SparseMatrix Operator::sparse() const {
    if (auto* s = std::get_if<SparseMatrix>(&m_)) return *s;
    return std::get<DenseMatrix>(m_).sparseView(0.0, 0.0);
}

Operator Operator::adjoint() const {
    if (is_sparse()) return {SparseMatrix(std::get<SparseMatrix>(m_).adjoint()), dims_};
    return {DenseMatrix(std::get<DenseMatrix>(m_).adjoint()), dims_};
}

Operator Operator::compacted(Index threshold) const {
    if (side() > threshold) return is_sparse() ? *this : Operator(sparse(), dims_);
    return is_sparse() ? Operator(dense(), dims_) : *this;
}

double Operator::max_abs() const {
    if (auto* d = std::get_if<DenseMatrix>(&m_)) return d->size() ? d->cwiseAbs().maxCoeff() : 0.0;
    const auto& s = std::get<SparseMatrix>(m_);
    double m = 0.0;
    for (Index k = 0; k < s.nonZeros(); ++k) m = std::max(m, std::abs(s.valuePtr()[k]));
    return m;
}

double Operator::hermiticity_defect() const {
    const double scale = max_abs();
    if (scale == 0.0) return 0.0;
    double defect = 0.0;
    if (is_sparse()) {
        const auto& s = std::get<SparseMatrix>(m_);
        SparseMatrix diff = s - SparseMatrix(s.adjoint());
        for (Index k = 0; k < diff.nonZeros(); ++k)
            defect = std::max(defect, std::abs(diff.valuePtr()[k]));
    } else {
        const auto& d = std::get<DenseMatrix>(m_);
        defect = (d - d.adjoint()).cwiseAbs().maxCoeff();
    }
    return defect / scale;
}

bool Operator::is_hermitian(double rel_tol) const { return hermiticity_defect() <= rel_tol; }

Vector Operator::apply(const Vector& v) const {
    if (v.size() != side()) throw DimensionError("vector length does not match operator side");
    return std::visit([&](const auto& m) -> Vector { return m * v; }, m_);
}

Operator operator+(const Operator& a, const Operator& b) {
    check_same(a, b, "operator+");
    if (!a.is_sparse() && !b.is_sparse()) return {DenseMatrix(a.dense() + b.dense()), a.dims()};
    return {SparseMatrix(a.sparse() + b.sparse()), a.dims()};
}

Operator operator-(const Operator& a, const Operator& b) {
    check_same(a, b, "operator-");
    if (!a.is_sparse() && !b.is_sparse()) return {DenseMatrix(a.dense() - b.dense()), a.dims()};
    return {SparseMatrix(a.sparse() - b.sparse()), a.dims()};
}

Operator operator*(const Operator& a, const Operator& b) {
    check_same(a, b, "operator*");
    if (!a.is_sparse() && !b.is_sparse()) return {DenseMatrix(a.dense() * b.dense()), a.dims()};
    return {SparseMatrix((a.sparse() * b.sparse()).pruned()), a.dims()};
}

Operator operator*(Complex s, const Operator& a) {
    if (a.is_sparse()) return {SparseMatrix(s * a.sparse()), a.dims()};
    return {DenseMatrix(s * a.dense()), a.dims()};
}

Operator kron(const Operator& a, const Operator& b, Index sparse_threshold) {
    Dims dims = concat(a.dims(), b.dims());
    const Index side = a.side() * b.side();
    if (side > sparse_threshold || a.is_sparse() || b.is_sparse()) {
        Operator out(kron_sparse(a.sparse(), b.sparse()), std::move(dims));
        return out.compacted(sparse_threshold);
    }
    return {dense_kron(a.dense(), b.dense()), std::move(dims)};
}

Operator kron(const std::vector<Operator>& factors, Index sparse_threshold) {
    if (factors.empty()) throw DimensionError("kron of an empty factor list");
    Operator out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k], sparse_threshold);
    return out.compacted(sparse_threshold);
}

StateVector kron(const StateVector& a, const StateVector& b) {
    Vector out(a.amplitudes.size() * b.amplitudes.size());
    for (Index i = 0; i < a.amplitudes.size(); ++i)
        out.segment(i * b.amplitudes.size(), b.amplitudes.size()) = a.amplitudes(i) * b.amplitudes;
    return {std::move(out), concat(a.dims, b.dims)};
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator identity(Index dim) {
    if (dim < 1) throw DimensionError("identity dimension must be positive");
    return {DenseMatrix(DenseMatrix::Identity(dim, dim)), Dims{dim}};
}

Operator zero(const Dims& dims) {
    const Index n = product(dims);
    return {SparseMatrix(n, n), dims};
}

Operator annihilation(Index dim) {
    if (dim < 2) throw DomainError("annihilation operator needs dim >= 2");
    DenseMatrix a = DenseMatrix::Zero(dim, dim);
    for (Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {std::move(a), Dims{dim}};
}

Operator sigma_minus() {
    DenseMatrix s = DenseMatrix::Zero(2, 2);
    s(0, 1) = 1.0;
    return {std::move(s), Dims{2}};
}

Operator sigma_plus() { return sigma_minus().adjoint(); }

Operator sigma_z() {
    DenseMatrix s = DenseMatrix::Zero(2, 2);
    s(0, 0) = -1.0;
    s(1, 1) = 1.0;
    return {std::move(s), Dims{2}};
}

Operator embed(const Operator& local, std::size_t site, const Dims& dims, Index sparse_threshold) {
    if (site >= dims.size()) throw DimensionError("embed: site index out of range");
    if (local.side() != dims[site]) throw DimensionError("embed: local operator has wrong dimension");
    const Index left = product(Dims(dims.begin(), dims.begin() + static_cast<long>(site)));
    const Index right = product(Dims(dims.begin() + static_cast<long>(site) + 1, dims.end()));
    const SparseMatrix loc = local.sparse();
    const Index d = local.side();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(left * right * loc.nonZeros()));
    for (Index l = 0; l < left; ++l)
        for (Index j = 0; j < loc.outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(loc, j); it; ++it)
                for (Index r = 0; r < right; ++r)
                    t.emplace_back((l * d + it.row()) * right + r, (l * d + it.col()) * right + r,
                                   it.value());
    const Index n = left * d * right;
    SparseMatrix out(n, n);
    out.setFromTriplets(t.begin(), t.end());
    return Operator(std::move(out), dims).compacted(sparse_threshold);
}

CollectiveOperators collective_ops(int n_qubits) {
    if (n_qubits < 1) throw DomainError("collective_ops needs at least one qubit");
    const Dims dims(static_cast<std::size_t>(n_qubits), 2);
    CollectiveOperators j{zero(dims), zero(dims), zero(dims)};
    for (std::size_t q = 0; q < dims.size(); ++q) {
        j.plus = j.plus + embed(sigma_plus(), q, dims);
        j.minus = j.minus + embed(sigma_minus(), q, dims);
        j.z = j.z + embed(sigma_z(), q, dims);
    }
    j.plus = j.plus.compacted();
    j.minus = j.minus.compacted();
    j.z = j.z.compacted();
    return j;
}

StateVector basis_state(Index index, Index dim) {
    if (index < 0 || index >= dim) throw DimensionError("basis index out of range");
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return {std::move(v), Dims{dim}};
}

StateVector fock_state(Index n, Index dim) { return basis_state(n, dim); }

StateVector qubit_state(bool excited) { return basis_state(excited ? 1 : 0, 2); }

Vector coherent_amplitudes(Complex alpha, Index dim) {
    Vector c(dim);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (Index n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

StateVector coherent_state(Complex alpha, Index dim) {
    if (dim < 1) throw DimensionError("coherent state dimension must be positive");
    if (std::norm(alpha) > static_cast<double>(dim) / 4.0)
        throw TruncationError("coherent state |alpha|^2 = " + std::to_string(std::norm(alpha)) +
                              " exceeds truncation guard dim/4 = " +
                              std::to_string(static_cast<double>(dim) / 4.0));
    Vector c = coherent_amplitudes(alpha, dim);
    c.normalize();
    return {std::move(c), Dims{dim}};
}

}  // namespace dicke
