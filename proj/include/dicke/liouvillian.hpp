#pragma once

#include "dicke/model.hpp"

namespace dicke {

struct LiouvillianOptions {
    /// Cap on the superoperator side D^2.
    Index max_superoperator_dim = 2'000'000;
};

/// Sparse superoperator acting on column-stacked vec(rho), i.e.
/// vec(rho)[i + D j] = rho(i, j), so that vec(A X B) = (B^T (x) A) vec(X).
class Liouvillian {
public:
    Liouvillian(SparseMatrix matrix, const LindbladModel& model);

    const SparseMatrix& matrix() const { return matrix_; }
    Index hilbert_dim() const { return hilbert_dim_; }
    const Dims& dims() const { return dims_; }
    Complex field_displacement() const { return displacement_; }
    bool permutation_symmetric() const { return symmetric_; }
    /// Frobenius norm of the superoperator.
    double norm() const { return norm_; }

    Vector apply(const Vector& vec_rho) const { return matrix_ * vec_rho; }
    DenseMatrix apply(const DenseMatrix& rho) const;

private:
    SparseMatrix matrix_;
    Index hilbert_dim_ = 0;
    Dims dims_;
    Complex displacement_ = 0.0;
    bool symmetric_ = false;
    double norm_ = 0.0;
};

/// L vec(rho) = vec(-i[H, rho] + sum_k r_k D[A_k] rho).
/// Throws ResourceError when D^2 exceeds the configured cap.
Liouvillian liouvillian(const LindbladModel& model, const LiouvillianOptions& options = {});

}  // namespace dicke
