#include "eegcs/prox.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <string>

namespace eegcs {
namespace {

void require_positive(double tau, const char* what) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument(std::string(what) + ": threshold must be positive and finite");
    }
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw NumericalError(std::string(what) + ": non-finite input");
    }
}

} // namespace

Matrix soft_threshold(const Matrix& v, double tau) {
    require_positive(tau, "soft_threshold");
    return v.unaryExpr([tau](double x) {
        const double mag = std::abs(x) - tau;
        return mag > 0.0 ? std::copysign(mag, x) : 0.0;
    });
}

Matrix svt(const Matrix& x, double tau) {
    require_positive(tau, "svt");
    require_finite(x, "svt");
    if (x.size() == 0) {
        return x;
    }
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    Index keep = 0;
    while (keep < s.size() && s(keep) > tau) {
        ++keep;
    }
    if (keep == 0) {
        return Matrix::Zero(x.rows(), x.cols());
    }
    const Vector shrunk = s.head(keep).array() - tau;
    return svd.matrixU().leftCols(keep) * shrunk.asDiagonal() *
           svd.matrixV().leftCols(keep).transpose();
}

double nuclear_norm(const Matrix& x) {
    require_finite(x, "nuclear_norm");
    if (x.size() == 0) {
        return 0.0;
    }
    Eigen::BDCSVD<Matrix> svd(x);
    return svd.singularValues().sum();
}

Matrix stack_identity(const Matrix& a) {
    Matrix out(a.rows() + a.cols(), a.cols());
    out.topRows(a.rows()) = a;
    out.bottomRows(a.cols()).setIdentity();
    return out;
}

PrefactoredSystem::PrefactoredSystem(const Matrix& op, const Matrix& g, double rho, double mu)
    : rho_(rho), mu_(mu) {
    if (!(rho > 0.0) || !(mu > 0.0)) {
        throw std::invalid_argument("prefactor: rho and mu must be positive");
    }
    if (op.cols() != g.cols()) {
        throw DimensionError("prefactor: operator has " + std::to_string(op.cols()) +
                             " columns but G has " + std::to_string(g.cols()));
    }
    require_finite(op, "prefactor");
    require_finite(g, "prefactor");
    system_ = rho * (op.transpose() * op) + mu * (g.transpose() * g);
    llt_.compute(system_);
    if (llt_.info() != Eigen::Success) {
        throw NumericalError("prefactor: system is not positive definite");
    }
}

Matrix PrefactoredSystem::solve(const Matrix& b) const {
    if (b.rows() != system_.rows()) {
        throw DimensionError("solve: right-hand side has " + std::to_string(b.rows()) +
                             " rows, system has " + std::to_string(system_.rows()));
    }
    return llt_.solve(b);
}

} // namespace eegcs
