#pragma once

#include "eegcs/sensing.hpp"
#include "eegcs/solvers.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eegcs {

/// Knobs of every registered solver. Zero means "derive from the problem".
struct SolverSettings {
    /// OMP/SOMP atom budget K; 0 selects floor(M / 4).
    Index sparsity = 0;
    double greedy_tol = 0.0;
    /// GAP/SGAP stop once the cosupport has shrunk by 2 * breakpoints rows;
    /// 0 selects floor(M / 4) breakpoints.
    Index breakpoints = 0;
    /// GAP/SGAP removal cap; 0 selects Q / 2.
    Index gap_max_iter = 0;
    AdmmParams sclr;
    AdmmParams constrained = AdmmParams::constrained_defaults();
};

/// Dictionaries and settings shared by all solver calls on one segment
/// length. Immutable; safe to share between threads.
class SolverContext {
public:
    explicit SolverContext(Index n, SolverSettings settings = {});

    [[nodiscard]] Index length() const { return omega_.length(); }
    [[nodiscard]] const AnalysisDictionary& omega() const { return omega_; }
    /// Throws DimensionError when N is not a power of two >= 8.
    [[nodiscard]] const SynthesisDictionary& psi() const;
    [[nodiscard]] const SolverSettings& settings() const { return settings_; }

    [[nodiscard]] Index sparsity_for(Index m) const;
    [[nodiscard]] Index target_cosparsity_for(Index m) const;
    [[nodiscard]] Index gap_max_iter() const;

private:
    AnalysisDictionary omega_;
    std::optional<SynthesisDictionary> psi_;
    SolverSettings settings_;
};

/// Registered names: omp, somp, gap, sgap, analysis-l1, nuclear, sclr-admm.
const std::vector<std::string>& solver_names();
bool is_known_solver(std::string_view name);

/// Dispatches by name. Single-channel solvers (omp, gap) run column by
/// column when Y has several columns; their traces are concatenated.
RecoveryResult recover(std::string_view name, const Matrix& y, const SensingMatrix& phi,
                       const SolverContext& context);

} // namespace eegcs
