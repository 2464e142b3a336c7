#include <gtest/gtest.h>

#include "eegcs/experiment.hpp"
#include "eegcs/synthetic.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace eegcs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "eegcs_experiment_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<SignalSegment> surrogate_segments(SegmentMode mode, std::size_t count, Index n = 64) {
    SurrogateEegOptions opt;
    opt.channels = 6;
    opt.seconds = 8;
    return segment(make_surrogate_eeg(opt), n, mode, count, 0).segments;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.mode = SegmentMode::MultiChannel;
    cfg.segment_length = 64;
    cfg.num_segments = 4;
    cfg.ssr_list = {25, 50};
    cfg.solvers = {"somp", "sgap", "omp"};
    cfg.timing = TimingMode::None;
    cfg.seed_base = 11;
    return cfg;
}

std::string csv_of(const MetricsReport& r) {
    std::ostringstream ss;
    write_report_csv(ss, r);
    return ss.str();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Experiment, DefaultGrid) {
    const auto g = default_ssr_grid();
    ASSERT_EQ(g.size(), 9u);
    EXPECT_EQ(g.front(), 10.0);
    EXPECT_EQ(g.back(), 50.0);
}

TEST(Experiment, MeasurementCount) {
    EXPECT_EQ(measurements_for(35, 256), 90);
    EXPECT_EQ(measurements_for(100, 256), 256);
    EXPECT_EQ(measurements_for(0.01, 256), 1);
}

TEST(Experiment, TrialSeedDependsOnIdentity) {
    EXPECT_EQ(trial_seed(1, 2, 35.0), trial_seed(1, 2, 35.0));
    EXPECT_NE(trial_seed(1, 2, 35.0), trial_seed(1, 3, 35.0));
    EXPECT_NE(trial_seed(1, 2, 35.0), trial_seed(1, 2, 40.0));
    EXPECT_NE(trial_seed(1, 2, 35.0), trial_seed(2, 2, 35.0));
}

TEST(Experiment, FullSamplingRecoversExactly) {
    ExperimentConfig cfg;
    cfg.mode = SegmentMode::SingleChannel;
    cfg.segment_length = 64;
    cfg.num_segments = 1;
    cfg.ssr_list = {100};
    cfg.solvers = {"omp"};
    cfg.solver.sparsity = 64;
    const auto segs = surrogate_segments(SegmentMode::SingleChannel, 1);
    const auto res = run_benchmark(cfg, segs);
    ASSERT_EQ(res.report.rows.size(), 1u);
    EXPECT_LE(res.report.rows[0].mse, 1e-10);
    EXPECT_GE(res.report.rows[0].mcc, 1 - 1e-10);
    EXPECT_EQ(res.report.rows[0].experiments, 1u);
}

TEST(Experiment, RowsSortedAndComplete) {
    const auto cfg = small_config();
    const auto res = run_benchmark(cfg, surrogate_segments(cfg.mode, 4));
    ASSERT_EQ(res.report.rows.size(), 6u);
    EXPECT_FALSE(res.report.partial);
    for (std::size_t i = 1; i < res.report.rows.size(); ++i) {
        const auto& a = res.report.rows[i - 1];
        const auto& b = res.report.rows[i];
        EXPECT_TRUE(a.solver < b.solver || (a.solver == b.solver && a.ssr_percent < b.ssr_percent));
    }
    for (const auto& r : res.report.rows) {
        EXPECT_GE(r.mse, 0.0);
        EXPECT_LE(std::abs(r.mcc), 1.0);
        EXPECT_EQ(r.mean_cpu_seconds, 0.0);
        EXPECT_EQ(r.seed_base, 11u);
    }
}

TEST(Experiment, SolversShareMeasurements) {
    const auto cfg = small_config();
    const auto res = run_benchmark(cfg, surrogate_segments(cfg.mode, 4));
    ASSERT_EQ(res.trials.size(), 8u);
    for (const auto& t : res.trials) {
        EXPECT_EQ(t.outcomes.size(), 3u);
        EXPECT_EQ(t.m, measurements_for(t.ssr_percent, 64));
        EXPECT_EQ(t.seed, trial_seed(11, t.segment, t.ssr_percent));
    }
}

TEST(Experiment, AggregationMatchesMetricDefinitions) {
    auto cfg = small_config();
    cfg.solvers = {"sgap"};
    const auto segs = surrogate_segments(cfg.mode, 4);
    const auto res = run_benchmark(cfg, segs);
    // Recompute the 25% row from scratch with the eval functions.
    const SolverContext ctx(64);
    std::vector<Matrix> hats;
    for (std::size_t l = 0; l < 4; ++l) {
        const auto phi = make_gaussian_sensing(16, 64, trial_seed(11, l, 25.0));
        hats.push_back(recover("sgap", phi.entries() * segs[l].data, phi, ctx).estimate);
    }
    // Eq. of the report averages per-trial terms; each trial has its own truth.
    double se = 0, cc = 0;
    for (std::size_t l = 0; l < 4; ++l) {
        se += mse(segs[l].data, std::span(&hats[l], 1));
        cc += mcc(segs[l].data, std::span(&hats[l], 1));
    }
    EXPECT_NEAR(res.report.rows[0].mse, se / 4, 1e-15);
    EXPECT_NEAR(res.report.rows[0].mcc, cc / 4, 1e-14);
}

TEST(Experiment, DeterministicAcrossWorkerCounts) {
    auto cfg = small_config();
    const auto segs = surrogate_segments(cfg.mode, 4);
    cfg.workers = 1;
    const auto a = csv_of(run_benchmark(cfg, segs).report);
    cfg.workers = 8;
    const auto b = csv_of(run_benchmark(cfg, segs).report);
    const auto c = csv_of(run_benchmark(cfg, segs).report);
    EXPECT_EQ(a, b);
    EXPECT_EQ(b, c);
}

TEST(Experiment, ResumeReproducesRemainingTrials) {
    auto cfg = small_config();
    const auto segs = surrogate_segments(cfg.mode, 4);
    const auto full = csv_of(run_benchmark(cfg, segs).report);

    cfg.checkpoint = scratch("resume.ckpt");
    fs::remove(cfg.checkpoint);
    BenchmarkControl stop_early;
    stop_early.max_new_trials = 3;
    const auto first = run_benchmark(cfg, segs, stop_early);
    EXPECT_TRUE(first.report.partial);
    EXPECT_EQ(first.trials.size(), 3u);
    EXPECT_NE(csv_of(first.report).find("# partial=true"), std::string::npos);

    cfg.workers = 3;
    const auto second = run_benchmark(cfg, segs);
    EXPECT_EQ(second.resumed, 3u);
    EXPECT_FALSE(second.report.partial);
    EXPECT_EQ(csv_of(second.report), full);

    auto other = cfg;
    other.seed_base = 12;
    EXPECT_THROW(run_benchmark(other, segs), std::invalid_argument);
    fs::remove(cfg.checkpoint);
}

TEST(Experiment, TornCheckpointLineIsIgnored) {
    auto cfg = small_config();
    const auto segs = surrogate_segments(cfg.mode, 4);
    cfg.checkpoint = scratch("torn.ckpt");
    fs::remove(cfg.checkpoint);
    BenchmarkControl two;
    two.max_new_trials = 2;
    run_benchmark(cfg, segs, two);
    {
        std::ofstream out(cfg.checkpoint, std::ios::app);
        out << "{\"segment\": 3, \"ssr";
    }
    const auto res = run_benchmark(cfg, segs);
    EXPECT_EQ(res.resumed, 2u);
    EXPECT_FALSE(res.report.partial);
    fs::remove(cfg.checkpoint);
}

TEST(Experiment, CancelledRunIsPartial) {
    const auto cfg = small_config();
    std::atomic<bool> cancel{true};
    BenchmarkControl control;
    control.cancel = &cancel;
    const auto res = run_benchmark(cfg, surrogate_segments(cfg.mode, 4), control);
    EXPECT_TRUE(res.report.partial);
    EXPECT_TRUE(res.trials.empty());
    EXPECT_TRUE(res.report.rows.empty());
}

TEST(Experiment, SolverFailureIsReported) {
    auto cfg = small_config();
    auto segs = surrogate_segments(cfg.mode, 4);
    segs[2].data(5, 1) = std::numeric_limits<double>::quiet_NaN();
    const auto res = run_benchmark(cfg, segs);
    EXPECT_FALSE(res.error.empty());
    EXPECT_TRUE(res.report.partial);
}

TEST(Experiment, ConfigValidation) {
    auto bad = [](auto edit) {
        auto cfg = small_config();
        edit(cfg);
        return cfg;
    };
    EXPECT_THROW(bad([](auto& c) { c.ssr_list = {0}; }).validate(), std::invalid_argument);
    EXPECT_THROW(bad([](auto& c) { c.ssr_list = {101}; }).validate(), std::invalid_argument);
    EXPECT_THROW(bad([](auto& c) { c.ssr_list = {}; }).validate(), std::invalid_argument);
    EXPECT_THROW(bad([](auto& c) { c.ssr_list = {20, 20}; }).validate(), std::invalid_argument);
    EXPECT_THROW(bad([](auto& c) { c.solvers = {"bsbl"}; }).validate(), std::invalid_argument);
    EXPECT_THROW(bad([](auto& c) { c.solvers = {}; }).validate(), std::invalid_argument);
    EXPECT_THROW(bad([](auto& c) { c.num_segments = 0; }).validate(), std::invalid_argument);
    EXPECT_THROW(bad([](auto& c) { c.solver.sclr.rho = -1; }).validate(), std::invalid_argument);
    EXPECT_NO_THROW(small_config().validate());
    EXPECT_THROW(parse_timing_mode("cpu"), std::invalid_argument);
}

TEST(Experiment, LoadsEdfAndContainer) {
    SurrogateEegOptions opt;
    opt.channels = 4;
    opt.seconds = 4;
    const auto edf = scratch("load.edf");
    save_edf(edf, make_surrogate_eeg(opt));

    ExperimentConfig cfg = small_config();
    cfg.input = edf;
    cfg.num_segments = 3;
    const auto from_edf = load_segments(cfg);
    ASSERT_EQ(from_edf.size(), 3u);
    EXPECT_EQ(from_edf[0].data.cols(), 4);

    const auto container = scratch("load.seg");
    export_segments(from_edf, container);
    cfg.input = container;
    EXPECT_EQ(load_segments(cfg), from_edf);

    cfg.num_segments = 5;
    EXPECT_THROW(load_segments(cfg), std::invalid_argument);
    cfg.num_segments = 3;
    cfg.segment_length = 128;
    EXPECT_THROW(load_segments(cfg), DimensionError);
    cfg.input = scratch("missing.edf");
    EXPECT_ANY_THROW(load_segments(cfg));
}

TEST(Experiment, JsonCarriesConfigAndTraces) {
    auto cfg = small_config();
    cfg.trace = true;
    cfg.solvers = {"sgap"};
    const auto res = run_benchmark(cfg, surrogate_segments(cfg.mode, 4));
    const auto doc = nlohmann::json::parse(benchmark_json(cfg, res));
    EXPECT_EQ(doc.at("config").at("seed_base"), 11);
    EXPECT_EQ(doc.at("rows").size(), 2u);
    ASSERT_EQ(doc.at("trials").size(), 8u);
    EXPECT_TRUE(doc.at("trials")[0].at("outcomes")[0].contains("trace"));
    EXPECT_EQ(report_from_json(doc.dump()).rows.size(), 2u);
}

// ---------------------------------------------------------------- CLI

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(EEGCS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Cli, IngestBenchReport) {
    const auto dir = scratch("cli");
    fs::create_directories(dir);
    const auto edf = (dir / "s.edf").string();
    const auto seg = (dir / "s.seg").string();
    ASSERT_EQ(run("synth --out " + edf + " --seconds 6 --channels 5 --seed 3"), 0);
    ASSERT_EQ(run("ingest --input " + edf + " --mode multi --segment-len 64 --num-segments 4 --out " + seg), 0);

    {
        std::ofstream conf(dir / "bench.conf");
        conf << "# sweep\ninput = \"" << seg << "\"\nmode = \"multi\"\nsegment-len = 64\n"
             << "num-segments = 4\nssr = [20, 40]\nsolvers = [\"somp\", \"sgap\"]\ntiming = \"none\"\n";
    }
    const auto conf = (dir / "bench.conf").string();
    const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
    ASSERT_EQ(run("bench --config " + conf + " --workers 1 --out " + a), 0);
    ASSERT_EQ(run("bench --config " + conf + " --workers 8 --out " + b), 0);
    EXPECT_EQ(read_file(a), read_file(b));
    EXPECT_EQ(read_file(a).substr(0, read_file(a).find('\n')), kReportCsvHeader);
    EXPECT_TRUE(fs::exists(dir / "a.json"));

    // flags override the file
    const auto c = (dir / "c.csv").string();
    ASSERT_EQ(run("bench --config " + conf + " --ssr 30 --solvers somp --out " + c), 0);
    std::ifstream in(c);
    const auto report = read_report_csv(in);
    ASSERT_EQ(report.rows.size(), 1u);
    EXPECT_EQ(report.rows[0].ssr_percent, 30.0);

    const auto merged = (dir / "merged.json").string();
    ASSERT_EQ(run("report " + a + " " + c + " --out " + merged), 0);
    EXPECT_EQ(report_from_json(read_file(merged)).rows.size(), 5u);

    const auto est = (dir / "x.csv").string();
    ASSERT_EQ(run("recover --input " + seg + " --mode multi --segment-len 64 --index 2 --solver sgap --ssr 40 --out " + est), 0);
    EXPECT_TRUE(fs::exists(est));
}

TEST(Cli, ConfigErrorsExitNonZero) {
    const auto dir = scratch("cli_err");
    fs::create_directories(dir);
    const auto edf = (dir / "s.edf").string();
    ASSERT_EQ(run("synth --out " + edf + " --seconds 4 --channels 3"), 0);
    const auto out = (dir / "r.csv").string();
    EXPECT_EQ(run("bench --input " + edf + " --segment-len 64 --num-segments 2 --solvers bsbl --out " + out), 2);
    EXPECT_EQ(run("bench --input " + edf + " --segment-len 64 --num-segments 2 --ssr 0 --out " + out), 2);
    EXPECT_EQ(run("bench --input " + (dir / "none.edf").string() + " --out " + out), 1);
    EXPECT_NE(run("bench --out " + out), 0);
    {
        std::ofstream conf(dir / "bad.conf");
        conf << "colour = \"blue\"\n";
    }
    EXPECT_EQ(run("bench --config " + (dir / "bad.conf").string() + " --input " + edf + " --out " + out), 2);
    EXPECT_NE(run("frobnicate"), 0);
}

TEST(Cli, SolverAbortFlushesPartialReport) {
    const auto dir = scratch("cli_abort");
    fs::create_directories(dir);
    auto segs = surrogate_segments(SegmentMode::MultiChannel, 2);
    segs[1].data(0, 0) = std::numeric_limits<double>::quiet_NaN();
    const auto container = (dir / "bad.seg").string();
    export_segments(segs, container);
    const auto out = dir / "r.csv";
    EXPECT_EQ(run("bench --input " + container + " --segment-len 64 --num-segments 2 --ssr 50 "
                  "--solvers sgap --workers 1 --out " + out.string()),
              1);
    EXPECT_NE(read_file(out).find("# partial=true"), std::string::npos);
    EXPECT_NE(read_file(dir / "r.json").find("\"error\""), std::string::npos);
}
