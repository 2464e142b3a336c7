#include "eegcs/prox.hpp"
#include "eegcs/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eegcs {
namespace {

using Clock = std::chrono::steady_clock;

void check_problem(const Matrix& y, const SensingMatrix& phi, const char* who) {
    if (y.rows() != phi.measurements()) {
        throw DimensionError(std::string(who) + ": measurements have " +
                             std::to_string(y.rows()) + " rows, sensing matrix has M=" +
                             std::to_string(phi.measurements()));
    }
    if (!y.allFinite()) {
        throw NumericalError(std::string(who) + ": non-finite measurements");
    }
}

// Two-block ADMM for
//     minimize g(z) subject to Phi x = y, G x = z
// with penalty rho on the measurement constraint and mu on the split.
// prox(v) must return argmin_z g(z) + mu/2 ||z - v||^2.
//
// The measurements are scaled to unit Frobenius norm before iterating and
// the estimate is scaled back, so the stopping rule is scale free. The
// recorded stopping statistic is
//     sqrt(rho ||Phi x - y||^2 + mu ||G x - z||^2 + mu ||z - z_prev||^2),
// the ADMM fixed-point residual, which is non-increasing in exact
// arithmetic.
template <typename Apply, typename Adjoint, typename Prox, typename Objective>
RecoveryResult split_constrained(const Matrix& y, const SensingMatrix& phi,
                                 const PrefactoredSystem& system, Index split_rows,
                                 const AdmmParams& params, Apply apply_g, Adjoint apply_gt,
                                 Prox prox, Objective objective) {
    const auto start = Clock::now();
    const Index n = phi.length();
    RecoveryResult result;

    const double scale = y.norm();
    if (scale == 0.0) {
        result.estimate = Matrix::Zero(n, y.cols());
        result.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
        return result;
    }
    const Matrix target = y / scale;
    const Matrix& ph = phi.entries();
    const double rho = params.rho;
    const double mu = params.inner.mu;

    Matrix x = Matrix::Zero(n, y.cols());
    Matrix z = Matrix::Zero(split_rows, y.cols());
    Matrix u = Matrix::Zero(split_rows, y.cols());
    Matrix w = Matrix::Zero(target.rows(), y.cols());

    result.converged = false;
    for (int k = 0; k < params.inner.max_iter; ++k) {
        x = system.solve(rho * (ph.transpose() * (target - w)) + mu * apply_gt(z - u));
        if (!x.allFinite()) {
            throw NumericalError("splitting iterate became non-finite");
        }
        const Matrix gx = apply_g(x);
        Matrix z_next = prox(gx + u);
        const Matrix split_gap = gx - z_next;
        const Matrix meas_gap = ph * x - target;
        u += split_gap;
        w += meas_gap;

        const double stat = std::sqrt(rho * meas_gap.squaredNorm() + mu * split_gap.squaredNorm() +
                                      mu * (z_next - z).squaredNorm());
        z = std::move(z_next);
        result.trace.push_back({split_gap.norm(), stat, scale * objective(gx), scale * x.norm()});
        ++result.iterations;
        if (stat <= params.inner.tol) {
            result.converged = true;
            break;
        }
    }
    result.estimate = scale * x;
    result.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

} // namespace

void AdmmParams::validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw std::invalid_argument("ADMM: rho must be positive");
    }
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw std::invalid_argument("ADMM: eta must be positive");
    }
    if (t_max < 1) {
        throw std::invalid_argument("ADMM: t_max must be at least 1");
    }
    if (!(inner.mu > 0.0) || !std::isfinite(inner.mu)) {
        throw std::invalid_argument("ADMM: inner mu must be positive");
    }
    if (inner.max_iter < 1) {
        throw std::invalid_argument("ADMM: inner iteration cap must be at least 1");
    }
    if (!(inner.tol > 0.0)) {
        throw std::invalid_argument("ADMM: inner tolerance must be positive");
    }
}

AdmmParams AdmmParams::constrained_defaults() {
    AdmmParams p;
    p.rho = 1e4;
    p.inner.mu = 1e3;
    p.inner.max_iter = 20000;
    p.inner.tol = 1e-9;
    return p;
}

RecoveryResult analysis_l1_block(const Matrix& y, const SensingMatrix& phi,
                                 const AnalysisDictionary& omega, const AdmmParams& params) {
    params.validate();
    check_problem(y, phi, "analysis_l1");
    if (omega.length() != phi.length()) {
        throw DimensionError("analysis_l1: analysis dictionary length does not match sensing matrix");
    }
    const PrefactoredSystem system(phi.entries(), omega.entries(), params.rho, params.inner.mu);
    const double threshold = 1.0 / params.inner.mu;
    return split_constrained(
        y, phi, system, omega.rows(), params,
        [&](const Matrix& x) { return omega.apply(x); },
        [&](const Matrix& z) { return omega.apply_adjoint(z); },
        [threshold](const Matrix& v) { return soft_threshold(v, threshold); },
        [](const Matrix& gx) { return gx.cwiseAbs().sum(); });
}

RecoveryResult analysis_l1(const Vector& y, const SensingMatrix& phi,
                           const AnalysisDictionary& omega, const AdmmParams& params) {
    return analysis_l1_block(Matrix(y), phi, omega, params);
}

RecoveryResult nuclear_min(const Matrix& y, const SensingMatrix& phi, const AdmmParams& params) {
    params.validate();
    check_problem(y, phi, "nuclear_min");
    const Index n = phi.length();
    const PrefactoredSystem system(phi.entries(), Matrix::Identity(n, n), params.rho,
                                   params.inner.mu);
    const double threshold = 1.0 / params.inner.mu;
    return split_constrained(
        y, phi, system, n, params, [](const Matrix& x) { return x; },
        [](const Matrix& z) { return z; },
        [threshold](const Matrix& v) { return svt(v, threshold); },
        [](const Matrix& gx) { return nuclear_norm(gx); });
}

std::string to_string(DualUpdateMode mode) {
    return mode == DualUpdateMode::Consensus ? "consensus" : "paper-literal";
}

DualUpdateMode parse_dual_update_mode(const std::string& text) {
    if (text == "consensus") {
        return DualUpdateMode::Consensus;
    }
    if (text == "paper-literal") {
        return DualUpdateMode::PaperLiteral;
    }
    throw std::invalid_argument("unknown dual update mode '" + text + "'");
}

} // namespace eegcs
