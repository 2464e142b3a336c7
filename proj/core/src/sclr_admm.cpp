#include "eegcs/prox.hpp"
#include "eegcs/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace eegcs {
namespace {

using Clock = std::chrono::steady_clock;

double relative_change(const Matrix& next, const Matrix& prev) {
    const double denom = std::max(next.norm(), std::numeric_limits<double>::min());
    return (next - prev).norm() / denom;
}

// Warm-started splitting state of one local subproblem.
struct LocalState {
    Matrix x;     // local iterate X_i
    Matrix dual;  // scaled consensus dual U_i
    Matrix split; // auxiliary copy (Omega X_1, or X_2)
    Matrix split_dual;
};

} // namespace

double sclr_stopping_statistic(const Matrix& next, const Matrix& prev) {
    const double a = next.norm();
    const double b = prev.norm();
    const double diff = (next - prev).norm();
    if (a == 0.0 && b == 0.0) {
        return 0.0;
    }
    if (a == 0.0 || b == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return diff / (a * b);
}

// Both local steps minimize  g_i(X_i) + rho/2 ||Ybar - Phibar X_i + Phibar U_i||_F^2
// with Ybar = [Y; X] and Phibar = [Phi; I]. Expanding the quadratic gives the
// normal-equation right-hand side rho * (Phi^T (Y + Phi U_i) + X + U_i); the
// regularizer is handled by an inner split (z = Omega X_1 with
// soft-thresholding, W = X_2 with singular value thresholding).
RecoveryResult sclr_admm(const Matrix& y, const SensingMatrix& phi,
                         const AnalysisDictionary& omega, const AdmmParams& params) {
    const auto start = Clock::now();
    params.validate();
    if (y.rows() != phi.measurements()) {
        throw DimensionError("sclr_admm: measurements have " + std::to_string(y.rows()) +
                             " rows, sensing matrix has M=" +
                             std::to_string(phi.measurements()));
    }
    if (omega.length() != phi.length()) {
        throw DimensionError("sclr_admm: analysis dictionary length does not match sensing matrix");
    }
    if (!y.allFinite()) {
        throw NumericalError("sclr_admm: non-finite measurements");
    }

    const Index n = phi.length();
    const Matrix& ph = phi.entries();
    const double rho = params.rho;
    const double mu = params.inner.mu;
    const double threshold = 1.0 / mu;
    const Matrix phi_bar = stack_identity(ph);
    const PrefactoredSystem analysis_system(phi_bar, omega.entries(), rho, mu);
    const PrefactoredSystem lowrank_system(phi_bar, Matrix::Identity(n, n), rho, mu);
    // Phibar^T Phibar = Phi^T Phi + I, the metric of the dual update.
    const PrefactoredSystem stacked_gram(ph, Matrix::Identity(n, n), 1.0, 1.0);

    Matrix global = ph.transpose() * y;
    LocalState s1{global, Matrix::Zero(n, y.cols()), omega.apply(global),
                  Matrix::Zero(omega.rows(), y.cols())};
    LocalState s2{global, Matrix::Zero(n, y.cols()), global, Matrix::Zero(n, y.cols())};

    RecoveryResult result;
    result.converged = false;
    for (int t = 0; t < params.t_max; ++t) {
        // step 1: analysis-l1 regularized least squares
        const Matrix rhs1 = rho * (ph.transpose() * (y + ph * s1.dual) + global + s1.dual);
        Matrix x1 = s1.x;
        for (int k = 0; k < params.inner.max_iter; ++k) {
            const Matrix next =
                analysis_system.solve(rhs1 + mu * omega.apply_adjoint(s1.split - s1.split_dual));
            const Matrix ox = omega.apply(next);
            s1.split = soft_threshold(ox + s1.split_dual, threshold);
            s1.split_dual += ox - s1.split;
            const double change = relative_change(next, x1);
            x1 = next;
            if (change <= params.inner.tol) {
                break;
            }
        }

        // step 2: nuclear-norm regularized least squares
        const Matrix rhs2 = rho * (ph.transpose() * (y + ph * s2.dual) + global + s2.dual);
        Matrix x2 = s2.x;
        for (int k = 0; k < params.inner.max_iter; ++k) {
            const Matrix next = lowrank_system.solve(rhs2 + mu * (s2.split - s2.split_dual));
            s2.split = svt(next + s2.split_dual, threshold);
            s2.split_dual += next - s2.split;
            const double change = relative_change(next, x2);
            x2 = next;
            if (change <= params.inner.tol) {
                break;
            }
        }
        if (!x1.allFinite() || !x2.allFinite()) {
            throw NumericalError("sclr_admm: non-finite local iterate at outer iteration " +
                                 std::to_string(t + 1));
        }

        // step 3: global average
        Matrix next_global = 0.5 * (x1 + x2);

        // step 4: scaled dual update
        if (params.dual_update_mode == DualUpdateMode::Consensus) {
            // Phibar U_i += proj_{range Phibar}(Ybar - Phibar X_i), i.e.
            // U_i += (Phibar^T Phibar)^{-1} (Phi^T (Y - Phi X_i) + X - X_i).
            s1.dual += stacked_gram.solve(ph.transpose() * (y - ph * x1) + next_global - x1);
            s2.dual += stacked_gram.solve(ph.transpose() * (y - ph * x2) + next_global - x2);
        } else {
            s1.dual += x1 - s1.x;
            s2.dual += x2 - s2.x;
        }
        s1.x = std::move(x1);
        s2.x = std::move(x2);

        const double stat = sclr_stopping_statistic(next_global, global);
        const double objective =
            omega.apply(s1.x).cwiseAbs().sum() + nuclear_norm(s2.x);
        result.trace.push_back({(s1.x - s2.x).norm(), stat, objective, next_global.norm()});
        ++result.iterations;
        global = std::move(next_global);
        if (stat <= params.eta) {
            result.converged = true;
            break;
        }
    }

    result.estimate = std::move(global);
    result.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

} // namespace eegcs
