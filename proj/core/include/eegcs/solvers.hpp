#pragma once

#include "eegcs/sensing.hpp"
#include "eegcs/types.hpp"

#include <string>
#include <vector>

namespace eegcs {

/// One row of a solver's iteration log.
struct TraceRecord {
    /// ||X1 - X2||_F for the consensus solver; the splitting gap
    /// ||G x - z|| for the single-regularizer ADMM solvers; zero for greedy
    /// solvers.
    double consensus_residual = 0.0;
    /// The quantity each solver compares against its stopping tolerance.
    double stopping_statistic = 0.0;
    double objective = 0.0;
    /// ||X||_F of the current iterate (convex solvers only).
    double estimate_norm = 0.0;
};

struct RecoveryResult {
    Matrix estimate;
    int iterations = 0;
    std::vector<TraceRecord> trace;
    double wall_time = 0.0;
    /// False when an iterative solver hit its cap before its tolerance.
    bool converged = true;
    /// Selected atoms (OMP/SOMP) or the final cosupport (GAP/SGAP).
    std::vector<Index> support;
};

enum class DualUpdateMode {
    /// Scaled dual ascent on the stacked constraint Ybar = Phibar X_i,
    /// restricted to range(Phibar):
    /// U_i += (Phibar^T Phibar)^{-1} Phibar^T (Ybar - Phibar X_i).
    /// Once X_i satisfies the measurements this is (Phi^T Phi + I)^{-1} (X - X_i).
    Consensus,
    /// U_i += X_i^{t+1} - X_i^t, the successive-iterate form.
    PaperLiteral,
};

/// Settings of the splitting loops used for the regularized least-squares
/// subproblems and for the standalone constrained solvers.
struct InnerSettings {
    double mu = 1.0;
    int max_iter = 50;
    double tol = 1e-6;
};

struct AdmmParams {
    double rho = 1.0;
    double eta = 0.05;
    int t_max = 5;
    InnerSettings inner;
    DualUpdateMode dual_update_mode = DualUpdateMode::Consensus;

    /// Throws std::invalid_argument unless rho, eta, mu, tol > 0 and
    /// t_max, max_iter >= 1.
    void validate() const;

    /// Defaults for analysis_l1 and nuclear_min, which run their splitting
    /// loop to a tight tolerance rather than a fixed inner budget.
    static AdmmParams constrained_defaults();
};

/// Orthogonal matching pursuit over the atoms of Phi * Psi. Atoms are
/// scored by |<a_j, r>| / ||a_j||; the active set is refit by least squares
/// after every selection. Stops after k atoms or once ||r||_2 <= tol.
RecoveryResult omp(const Vector& y, const SensingMatrix& phi, const SynthesisDictionary& psi,
                   Index k, double tol);

/// Simultaneous OMP: one support shared by all columns of Y, scored by the
/// l2 norm of the per-channel correlations.
RecoveryResult somp(const Matrix& y, const SensingMatrix& phi, const SynthesisDictionary& psi,
                    Index k, double tol);

/// Greedy analysis pursuit. Starts from the full cosupport and removes one
/// row per iteration (the largest |Omega x|) until the cosupport holds
/// target_cosparsity rows or max_iter rows have been removed. Each step solves
/// min ||Omega_L x||^2 subject to y = Phi x exactly.
RecoveryResult gap(const Vector& y, const SensingMatrix& phi, const AnalysisDictionary& omega,
                   Index target_cosparsity, Index max_iter);

/// GAP with a cosupport shared across channels; rows are ranked by the l2
/// norm of row q of Omega X.
RecoveryResult sgap(const Matrix& y, const SensingMatrix& phi, const AnalysisDictionary& omega,
                    Index target_cosparsity, Index max_iter);

/// minimize ||Omega x||_1 subject to y = Phi x.
RecoveryResult analysis_l1(const Vector& y, const SensingMatrix& phi,
                           const AnalysisDictionary& omega, const AdmmParams& params);

/// Column-wise analysis_l1 on a block of measurements (vec(Omega X) is
/// separable across columns).
RecoveryResult analysis_l1_block(const Matrix& y, const SensingMatrix& phi,
                                 const AnalysisDictionary& omega, const AdmmParams& params);

/// minimize ||X||_* subject to Y = Phi X.
RecoveryResult nuclear_min(const Matrix& y, const SensingMatrix& phi, const AdmmParams& params);

/// Consensus ADMM for minimize ||vec(Omega X)||_1 + ||X||_* s.t. Y = Phi X.
RecoveryResult sclr_admm(const Matrix& y, const SensingMatrix& phi,
                         const AnalysisDictionary& omega, const AdmmParams& params);

/// ||X1 - X||_F / (||X1||_F ||X||_F) with the zero conventions used by
/// sclr_admm: 0 when both are zero, +inf when exactly one is.
double sclr_stopping_statistic(const Matrix& next, const Matrix& prev);

std::string to_string(DualUpdateMode mode);
DualUpdateMode parse_dual_update_mode(const std::string& text);

} // namespace eegcs
