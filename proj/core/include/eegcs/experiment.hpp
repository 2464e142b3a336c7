#pragma once

#include "eegcs/eval.hpp"
#include "eegcs/registry.hpp"
#include "eegcs/segments.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace eegcs {

enum class TimingMode {
    /// Wall-clock seconds of each solver call.
    WallClock,
    /// Report zero time; makes the report a pure function of the config.
    None,
};

std::string to_string(TimingMode mode);
TimingMode parse_timing_mode(const std::string& text);

/// 10, 15, ..., 50 percent.
std::vector<double> default_ssr_grid();

struct ExperimentConfig {
    /// EDF recording or segment container (detected from the leading bytes).
    std::filesystem::path input;
    SegmentMode mode = SegmentMode::MultiChannel;
    Index segment_length = 256;
    /// Leading channels to use from an EDF input; 0 keeps all.
    Index channels = 0;
    std::size_t num_segments = 10;
    std::vector<double> ssr_list = default_ssr_grid();
    std::vector<std::string> solvers;
    std::uint64_t seed_base = 1;
    /// Seeds the segmentation offset; 0 starts at sample 0.
    std::uint64_t segment_seed = 0;
    SolverSettings solver;
    TimingMode timing = TimingMode::WallClock;
    bool trace = false;
    /// Worker threads; 0 uses the hardware concurrency.
    std::size_t workers = 0;
    /// Append-only record of finished trials; enables resume when set.
    std::filesystem::path checkpoint;

    /// Throws std::invalid_argument on any out-of-range field.
    void validate() const;
};

/// M = round(SSR * N / 100), clamped to [1, N].
Index measurements_for(double ssr_percent, Index n);

/// Seed of the sensing matrix shared by every solver of trial (l, SSR).
std::uint64_t trial_seed(std::uint64_t seed_base, std::size_t segment, double ssr_percent);

/// Reads cfg.input and returns the first cfg.num_segments segments.
std::vector<SignalSegment> load_segments(const ExperimentConfig& cfg);

struct SolverOutcome {
    std::string solver;
    double squared_error = 0.0;
    double correlation = 0.0;
    double seconds = 0.0;
    int iterations = 0;
    bool converged = true;
    std::vector<TraceRecord> trace;
};

/// One (segment, SSR) job: all solvers see the same measurements.
struct TrialRecord {
    std::size_t segment = 0;
    double ssr_percent = 0.0;
    Index m = 0;
    std::uint64_t seed = 0;
    std::vector<SolverOutcome> outcomes;
};

struct BenchmarkResult {
    MetricsReport report;
    /// Finished trials ordered by (segment, SSR).
    std::vector<TrialRecord> trials;
    std::size_t resumed = 0;
    /// First solver failure, empty on success.
    std::string error;
};

struct BenchmarkControl {
    /// Set from another thread (or a signal handler) to stop scheduling jobs.
    std::atomic<bool>* cancel = nullptr;
    /// Stop after this many newly computed trials; 0 means no limit.
    std::size_t max_new_trials = 0;
};

/// Runs every (segment, SSR) trial on a bounded worker pool and aggregates
/// MSE, MCC and mean time per (solver, SSR). The report is independent of
/// worker count and scheduling. Trials already present in cfg.checkpoint are
/// reused. A cancelled or failed run returns report.partial = true.
BenchmarkResult run_benchmark(const ExperimentConfig& cfg, const std::vector<SignalSegment>& segments,
                              const BenchmarkControl& control = {});

/// Report JSON plus "config" echo and, when cfg.trace is set, per-trial traces.
std::string benchmark_json(const ExperimentConfig& cfg, const BenchmarkResult& result);

} // namespace eegcs
