#pragma once

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace dicke {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;  // column-major
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Ordered subsystem dimensions. The cavity always comes first, then the
/// qubits (or qutrits) in index order.
using Dims = std::vector<Index>;

Index product(const Dims& dims);

/// Side length above which freshly built operators are stored sparse.
inline constexpr Index kDefaultSparseThreshold = 256;

/// Square complex matrix on a tensor-product Hilbert space.
///
/// Immutable once built. Storage is dense or sparse; every operation accepts
/// either and the result is sparse whenever one operand is.
class Operator {
public:
    Operator() = default;
    Operator(DenseMatrix m, Dims dims);
    Operator(SparseMatrix m, Dims dims);

    Index side() const;
    const Dims& dims() const { return dims_; }
    bool is_sparse() const { return std::holds_alternative<SparseMatrix>(m_); }

    DenseMatrix dense() const;
    SparseMatrix sparse() const;

    Operator adjoint() const;
    /// Re-store as sparse or dense according to `threshold`.
    Operator compacted(Index threshold = kDefaultSparseThreshold) const;

    /// max |A - A^dagger| relative to max |A| (0 for the zero operator).
    double hermiticity_defect() const;
    bool is_hermitian(double rel_tol = 1e-12) const;
    double max_abs() const;

    Vector apply(const Vector& v) const;

    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(Complex s, const Operator& a);
    friend Operator operator*(const Operator& a, Complex s) { return s * a; }

private:
    std::variant<DenseMatrix, SparseMatrix> m_;
    Dims dims_;
};

/// State vector with recorded subsystem dimensions.
struct StateVector {
    Vector amplitudes;
    Dims dims;

    double norm() const { return amplitudes.norm(); }
};

/// Kronecker product; dims of the result are `a.dims` followed by `b.dims`.
Operator kron(const Operator& a, const Operator& b,
              Index sparse_threshold = kDefaultSparseThreshold);
Operator kron(const std::vector<Operator>& factors,
              Index sparse_threshold = kDefaultSparseThreshold);
StateVector kron(const StateVector& a, const StateVector& b);

/// Raw sparse Kronecker product (no dims bookkeeping).
SparseMatrix kron_sparse(const SparseMatrix& a, const SparseMatrix& b);

/// Commutator AB - BA.
Operator commutator(const Operator& a, const Operator& b);

Operator identity(Index dim);
Operator zero(const Dims& dims);

/// Truncated bosonic lowering operator, a|n> = sqrt(n)|n-1>. Requires dim >= 2.
Operator annihilation(Index dim);

// Two-level operators in the basis {|g> = 0, |e> = 1}; sigma_z|e> = +|e>.
Operator sigma_minus();
Operator sigma_plus();
Operator sigma_z();

/// Single-site operator placed at `site` of a product space with `dims`,
/// identities elsewhere.
Operator embed(const Operator& local, std::size_t site, const Dims& dims,
               Index sparse_threshold = kDefaultSparseThreshold);

struct CollectiveOperators {
    Operator plus;   // J+ = sum_j sigma+_j
    Operator minus;  // J- = sum_j sigma-_j
    Operator z;      // Jz = sum_j sigma^z_j, eigenvalue 2m on |l,m>
};

/// Collective spin operators on the bare 2^N qubit space.
CollectiveOperators collective_ops(int n_qubits);

StateVector basis_state(Index index, Index dim);
StateVector fock_state(Index n, Index dim);
/// |g> or |e> of a single qubit.
StateVector qubit_state(bool excited);

/// Normalized coherent state truncated to `dim` levels.
/// Throws TruncationError unless |alpha|^2 <= dim / 4.
StateVector coherent_state(Complex alpha, Index dim);

/// Untruncated coherent-state amplitudes <n|alpha> for n < dim (not renormalized).
Vector coherent_amplitudes(Complex alpha, Index dim);

}  // namespace dicke
