#include "eegcs/registry.hpp"

#include <algorithm>
#include <stdexcept>

namespace eegcs {
namespace {

bool wavelet_length(Index n) { return n >= 8 && (n & (n - 1)) == 0; }

template <typename Fn>
RecoveryResult column_by_column(const Matrix& y, Index n, Fn solve) {
    RecoveryResult out;
    out.estimate.resize(n, y.cols());
    for (Index c = 0; c < y.cols(); ++c) {
        RecoveryResult r = solve(Vector(y.col(c)));
        out.estimate.col(c) = r.estimate.col(0);
        out.iterations += r.iterations;
        out.trace.insert(out.trace.end(), r.trace.begin(), r.trace.end());
        out.wall_time += r.wall_time;
        out.converged = out.converged && r.converged;
        if (y.cols() == 1) {
            out.support = std::move(r.support);
        }
    }
    return out;
}

} // namespace

SolverContext::SolverContext(Index n, SolverSettings settings)
    : omega_(make_second_order_difference(n)), settings_(std::move(settings)) {
    if (wavelet_length(n)) {
        psi_ = make_wavelet_synthesis(n);
    }
    settings_.sclr.validate();
    settings_.constrained.validate();
}

const SynthesisDictionary& SolverContext::psi() const {
    if (!psi_) {
        throw DimensionError("wavelet dictionary needs a power-of-two segment length >= 8");
    }
    return *psi_;
}

Index SolverContext::sparsity_for(Index m) const {
    const Index k = settings_.sparsity > 0 ? settings_.sparsity : m / 4;
    return std::clamp<Index>(k, 1, m);
}

Index SolverContext::target_cosparsity_for(Index m) const {
    const Index bp = settings_.breakpoints > 0 ? settings_.breakpoints : m / 4;
    return std::max<Index>(omega_.rows() - 2 * bp, 0);
}

Index SolverContext::gap_max_iter() const {
    return settings_.gap_max_iter > 0 ? settings_.gap_max_iter : omega_.rows() / 2;
}

const std::vector<std::string>& solver_names() {
    static const std::vector<std::string> names = {"omp",         "somp",    "gap",      "sgap",
                                                   "analysis-l1", "nuclear", "sclr-admm"};
    return names;
}

bool is_known_solver(std::string_view name) {
    const auto& names = solver_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

RecoveryResult recover(std::string_view name, const Matrix& y, const SensingMatrix& phi,
                       const SolverContext& context) {
    const auto& s = context.settings();
    const Index m = phi.measurements();
    const Index n = phi.length();
    if (n != context.length()) {
        throw DimensionError("solver context built for N=" + std::to_string(context.length()) +
                             ", sensing matrix has N=" + std::to_string(n));
    }
    if (name == "omp") {
        const auto& psi = context.psi();
        const Index k = context.sparsity_for(m);
        return column_by_column(y, n, [&](const Vector& col) {
            return omp(col, phi, psi, k, s.greedy_tol);
        });
    }
    if (name == "somp") {
        return somp(y, phi, context.psi(), context.sparsity_for(m), s.greedy_tol);
    }
    if (name == "gap") {
        const Index target = context.target_cosparsity_for(m);
        const Index cap = context.gap_max_iter();
        return column_by_column(y, n, [&](const Vector& col) {
            return gap(col, phi, context.omega(), target, cap);
        });
    }
    if (name == "sgap") {
        return sgap(y, phi, context.omega(), context.target_cosparsity_for(m),
                    context.gap_max_iter());
    }
    if (name == "analysis-l1") {
        return analysis_l1_block(y, phi, context.omega(), s.constrained);
    }
    if (name == "nuclear") {
        return nuclear_min(y, phi, s.constrained);
    }
    if (name == "sclr-admm") {
        return sclr_admm(y, phi, context.omega(), s.sclr);
    }
    throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

} // namespace eegcs
