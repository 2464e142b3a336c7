#pragma once

#include "eegcs/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace eegcs {

/// Subsampling ratio 100 * M / N, in percent.
double ssr(Index m, Index n);

/// Mean squared error between the Frobenius-normalized truth and each
/// Frobenius-normalized estimate:
///     sum_l ||Xhat_l - X||_F^2 / (L N R).
/// A zero estimate is compared as-is (it cannot be normalized).
double mse(const Matrix& truth, std::span<const Matrix> estimates);

/// Mean cross-correlation
///     sum_l vec(X)^T vec(Xhat_l) / (L ||X||_F ||Xhat_l||_F).
/// Throws std::invalid_argument on a zero-norm truth or estimate.
double mcc(const Matrix& truth, std::span<const Matrix> estimates);

/// Per-experiment contributions used by the benchmark aggregation.
struct TrialMetrics {
    /// ||Xhat/||Xhat|| - X/||X|| ||_F^2 (Xhat taken as-is when zero).
    double squared_error = 0.0;
    /// Normalized correlation; 0 for a zero estimate.
    double correlation = 0.0;
};

TrialMetrics trial_metrics(const Matrix& truth, const Matrix& estimate);

struct MetricsRow {
    std::string solver;
    double ssr_percent = 0.0;
    double mse = 0.0;
    double mcc = 0.0;
    double mean_cpu_seconds = 0.0;
    std::size_t experiments = 0;
    std::uint64_t seed_base = 0;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;
    bool partial = false;

    /// Orders rows by (solver, ssr_percent).
    void sort_rows();
};

inline constexpr const char* kReportCsvHeader =
    "solver,ssr_percent,mse,mcc,mean_cpu_seconds,L,seed_base";

/// Header line, one line per row, and a trailing "# partial=true" line for
/// incomplete reports.
void write_report_csv(std::ostream& out, const MetricsReport& report);
MetricsReport read_report_csv(std::istream& in);

/// {"partial": bool, "rows": [{"solver", "ssr_percent", "mse", "mcc",
///  "mean_cpu_seconds", "L", "seed_base"}, ...]}
std::string report_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);

} // namespace eegcs
