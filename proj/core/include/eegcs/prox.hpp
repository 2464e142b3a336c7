#pragma once

#include "eegcs/types.hpp"

#include <Eigen/Cholesky>

namespace eegcs {

/// sign(v) * max(|v| - tau, 0), elementwise. tau must be positive.
Matrix soft_threshold(const Matrix& v, double tau);

/// Singular value thresholding: U max(S - tau, 0) V^T. This is the
/// proximal map of tau * ||.||_*.
Matrix svt(const Matrix& x, double tau);

/// Sum of singular values.
double nuclear_norm(const Matrix& x);

/// [A; I], the operator stacked with an identity block.
Matrix stack_identity(const Matrix& a);

/// Cholesky factor of rho * A^T A + mu * G^T G, computed once and reused for
/// any number of right-hand sides.
class PrefactoredSystem {
public:
    PrefactoredSystem(const Matrix& op, const Matrix& g, double rho, double mu);

    /// Solves (rho A^T A + mu G^T G) X = B.
    [[nodiscard]] Matrix solve(const Matrix& b) const;

    [[nodiscard]] const Matrix& system() const { return system_; }
    [[nodiscard]] double rho() const { return rho_; }
    [[nodiscard]] double mu() const { return mu_; }
    [[nodiscard]] Index size() const { return system_.rows(); }

private:
    Matrix system_;
    Eigen::LLT<Matrix> llt_;
    double rho_;
    double mu_;
};

} // namespace eegcs
