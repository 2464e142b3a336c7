#include "eegcs/solvers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <string>

namespace eegcs {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_measurements(const Matrix& y, const SensingMatrix& phi, const char* who) {
    if (y.rows() != phi.measurements()) {
        throw DimensionError(std::string(who) + ": measurements have " +
                             std::to_string(y.rows()) + " rows, sensing matrix has M=" +
                             std::to_string(phi.measurements()));
    }
    if (y.cols() < 1) {
        throw DimensionError(std::string(who) + ": no measurement columns");
    }
    if (!y.allFinite()) {
        throw NumericalError(std::string(who) + ": non-finite measurements");
    }
}

RecoveryResult simultaneous_omp(const Matrix& y, const SensingMatrix& phi,
                                const SynthesisDictionary& psi, Index k, double tol) {
    const auto start = Clock::now();
    check_measurements(y, phi, "omp");
    if (psi.length() != phi.length()) {
        throw DimensionError("omp: dictionary length does not match sensing matrix");
    }
    if (k < 1 || k > phi.measurements()) {
        throw DimensionError("omp: sparsity K=" + std::to_string(k) +
                             " must satisfy 1 <= K <= M=" + std::to_string(phi.measurements()));
    }
    if (tol < 0.0) {
        throw std::invalid_argument("omp: tolerance must be non-negative");
    }

    const Matrix atoms = phi.entries() * psi.entries();
    const Vector atom_norms = atoms.colwise().norm().transpose();
    for (Index j = 0; j < atoms.cols(); ++j) {
        if (!(atom_norms(j) > 0.0)) {
            throw NumericalError("omp: atom " + std::to_string(j) + " of Phi*Psi is zero");
        }
    }

    RecoveryResult result;
    std::vector<bool> active(static_cast<std::size_t>(atoms.cols()), false);
    Matrix residual = y;
    Matrix coeffs;
    Matrix basis(atoms.rows(), 0);

    while (static_cast<Index>(result.support.size()) < k && residual.norm() > tol) {
        const Matrix corr = atoms.transpose() * residual;
        Index best = -1;
        double best_score = -1.0;
        for (Index j = 0; j < atoms.cols(); ++j) {
            if (active[static_cast<std::size_t>(j)]) {
                continue;
            }
            const double score = corr.row(j).norm() / atom_norms(j);
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        if (best < 0) {
            break;
        }
        active[static_cast<std::size_t>(best)] = true;
        result.support.push_back(best);

        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = atoms.col(best);
        Eigen::ColPivHouseholderQR<Matrix> qr(basis);
        if (qr.rank() < basis.cols()) {
            throw NumericalError("omp: rank-deficient active set after selecting atom " +
                                 std::to_string(best) + " (" +
                                 std::to_string(result.support.size()) + " atoms)");
        }
        coeffs = qr.solve(y);
        residual = y - basis * coeffs;

        const double rnorm = residual.norm();
        result.trace.push_back({0.0, rnorm, rnorm});
        ++result.iterations;
    }

    Matrix theta = Matrix::Zero(atoms.cols(), y.cols());
    for (std::size_t i = 0; i < result.support.size(); ++i) {
        theta.row(result.support[i]) = coeffs.row(static_cast<Index>(i));
    }
    result.estimate = psi.entries() * theta;
    result.wall_time = seconds_since(start);
    return result;
}

Index cosupport_size(const std::vector<bool>& in) {
    Index n = 0;
    for (bool b : in) {
        n += b ? 1 : 0;
    }
    return n;
}

RecoveryResult simultaneous_gap(const Matrix& y, const SensingMatrix& phi,
                                const AnalysisDictionary& omega, Index target_cosparsity,
                                Index max_iter) {
    const auto start = Clock::now();
    check_measurements(y, phi, "gap");
    if (omega.length() != phi.length()) {
        throw DimensionError("gap: analysis dictionary length does not match sensing matrix");
    }
    const Index q = omega.rows();
    if (target_cosparsity < 0 || target_cosparsity > q) {
        throw DimensionError("gap: target cosparsity " + std::to_string(target_cosparsity) +
                             " must lie in [0, Q=" + std::to_string(q) + "]");
    }
    if (max_iter < 0) {
        throw std::invalid_argument("gap: max_iter must be non-negative");
    }

    // Every feasible x is x_p + B z with x_p the minimum-norm solution of
    // y = Phi x and B an orthonormal basis of null(Phi). Minimizing
    // ||Omega_L x||^2 then reduces to a small unconstrained least-squares
    // problem in z whose Gram matrix is downdated as rows leave L.
    const Index n = phi.length();
    const Index m = phi.measurements();
    const Eigen::ColPivHouseholderQR<Matrix> qr(phi.entries().transpose());
    if (qr.rank() < m) {
        throw NumericalError("gap: sensing matrix has rank " + std::to_string(qr.rank()) +
                             " < M=" + std::to_string(m) + ", constraint system is infeasible");
    }
    const Matrix basis = qr.householderQ();
    const Matrix pty = qr.colsPermutation().transpose() * y;
    const Matrix w = qr.matrixR()
                         .topLeftCorner(m, m)
                         .triangularView<Eigen::Upper>()
                         .transpose()
                         .solve(pty);
    const Matrix particular = basis.leftCols(m) * w;
    const Matrix null_basis = basis.rightCols(n - m);
    const Matrix reduced = omega.apply(null_basis);     // Omega B
    const Matrix offset = omega.apply(particular);      // Omega x_p
    Matrix gram = reduced.transpose() * reduced;
    Matrix cross = reduced.transpose() * offset;
    std::vector<bool> in(static_cast<std::size_t>(q), true);

    RecoveryResult result;
    Matrix x;
    Index removed = 0;
    while (true) {
        x = particular;
        if (n > m) {
            Eigen::LLT<Matrix> llt(gram);
            if (llt.info() != Eigen::Success) {
                throw NumericalError("gap: cosupport of " + std::to_string(cosupport_size(in)) +
                                     " rows leaves the least-squares step underdetermined");
            }
            x.noalias() -= null_basis * llt.solve(cross);
        }
        if (!x.allFinite()) {
            throw NumericalError("gap: non-finite least-squares iterate");
        }
        const Matrix analysis = omega.apply(x);
        double energy = 0.0;
        for (Index r = 0; r < q; ++r) {
            if (in[static_cast<std::size_t>(r)]) {
                energy += analysis.row(r).squaredNorm();
            }
        }
        const Index size = q - removed;
        result.trace.push_back({0.0, static_cast<double>(size), energy});
        ++result.iterations;

        if (size <= target_cosparsity || removed >= max_iter) {
            break;
        }
        Index worst = -1;
        double worst_score = -1.0;
        for (Index r = 0; r < q; ++r) {
            if (!in[static_cast<std::size_t>(r)]) {
                continue;
            }
            const double score = analysis.row(r).norm();
            if (score > worst_score) {
                worst_score = score;
                worst = r;
            }
        }
        in[static_cast<std::size_t>(worst)] = false;
        ++removed;
        gram.noalias() -= reduced.row(worst).transpose() * reduced.row(worst);
        cross.noalias() -= reduced.row(worst).transpose() * offset.row(worst);
    }

    for (Index r = 0; r < q; ++r) {
        if (in[static_cast<std::size_t>(r)]) {
            result.support.push_back(r);
        }
    }
    result.estimate = std::move(x);
    result.wall_time = seconds_since(start);
    return result;
}

} // namespace

RecoveryResult omp(const Vector& y, const SensingMatrix& phi, const SynthesisDictionary& psi,
                   Index k, double tol) {
    return simultaneous_omp(Matrix(y), phi, psi, k, tol);
}

RecoveryResult somp(const Matrix& y, const SensingMatrix& phi, const SynthesisDictionary& psi,
                    Index k, double tol) {
    return simultaneous_omp(y, phi, psi, k, tol);
}

RecoveryResult gap(const Vector& y, const SensingMatrix& phi, const AnalysisDictionary& omega,
                   Index target_cosparsity, Index max_iter) {
    return simultaneous_gap(Matrix(y), phi, omega, target_cosparsity, max_iter);
}

RecoveryResult sgap(const Matrix& y, const SensingMatrix& phi, const AnalysisDictionary& omega,
                    Index target_cosparsity, Index max_iter) {
    return simultaneous_gap(y, phi, omega, target_cosparsity, max_iter);
}

} // namespace eegcs
