// eegcs: ingest EEG recordings, run recovery sweeps, inspect reports.

#include "eegcs/edf.hpp"
#include "eegcs/experiment.hpp"
#include "eegcs/matrix_io.hpp"
#include "eegcs/registry.hpp"
#include "eegcs/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace eegcs;

std::atomic<bool> g_cancel{false};

extern "C" void on_interrupt(int) { g_cancel = true; }

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kBadConfig = 2;
constexpr int kInterrupted = 130;

struct Options {
    ExperimentConfig cfg;
    std::string mode = "multi";
    std::string timing = "wall";
    std::string dual_mode = "consensus";
    std::filesystem::path out;
    std::filesystem::path json_out;

    // ingest / recover
    std::size_t index = 0;
    std::string solver;
    double ssr = 35.0;

    // synth
    SurrogateEegOptions synth;

    // report
    std::vector<std::string> reports;
};

void add_data_options(CLI::App* app, Options& o) {
    app->add_option("--input", o.cfg.input, "EDF recording or segment container");
    app->add_option("--mode", o.mode, "single or multi")
        ->check(CLI::IsMember({"single", "multi", "single-channel", "multi-channel"}));
    app->add_option("--segment-len", o.cfg.segment_length, "Samples per segment (N)");
    app->add_option("--channels", o.cfg.channels, "Leading EDF channels to keep; 0 keeps all");
    app->add_option("--num-segments", o.cfg.num_segments, "Segments to use (L)");
    app->add_option("--segment-seed", o.cfg.segment_seed, "Seeds the segmentation offset");
}

void add_solver_options(CLI::App* app, Options& o) {
    auto& s = o.cfg.solver;
    app->add_option("--sparsity", s.sparsity, "OMP/SOMP atom budget; 0 = M/4");
    app->add_option("--greedy-tol", s.greedy_tol, "OMP/SOMP residual tolerance");
    app->add_option("--breakpoints", s.breakpoints, "GAP/SGAP expected breakpoints; 0 = M/4");
    app->add_option("--gap-max-iter", s.gap_max_iter, "GAP/SGAP removal cap; 0 = Q/2");
    app->add_option("--rho", s.sclr.rho, "SCLR penalty rho");
    app->add_option("--eta", s.sclr.eta, "SCLR stopping tolerance eta");
    app->add_option("--t-max", s.sclr.t_max, "SCLR outer iterations");
    app->add_option("--inner-mu", s.sclr.inner.mu, "SCLR inner splitting penalty");
    app->add_option("--inner-max-iter", s.sclr.inner.max_iter, "SCLR inner iteration cap");
    app->add_option("--inner-tol", s.sclr.inner.tol, "SCLR inner tolerance");
    app->add_option("--dual-update", o.dual_mode, "consensus or paper-literal")
        ->check(CLI::IsMember({"consensus", "paper-literal"}));
    app->add_option("--l1-rho", s.constrained.rho, "analysis-l1/nuclear measurement penalty");
    app->add_option("--l1-mu", s.constrained.inner.mu, "analysis-l1/nuclear split penalty");
    app->add_option("--l1-max-iter", s.constrained.inner.max_iter,
                    "analysis-l1/nuclear iteration cap");
    app->add_option("--l1-tol", s.constrained.inner.tol, "analysis-l1/nuclear tolerance");
}

// Fills options left unset on the command line from a key = value file.
// Keys are long option names without dashes, optionally under [bench].
void apply_config_file(CLI::App* app, const std::string& path) {
    for (const auto& item : CLI::ConfigTOML().from_file(path)) {
        if (item.name == "++" || item.name == "--") {
            continue; // section markers
        }
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == app->get_name())) {
            throw std::invalid_argument(path + ": unexpected section for key '" + item.name + "'");
        }
        CLI::Option* opt = app->get_option_no_throw("--" + item.name);
        if (opt == nullptr || item.name == "config") {
            throw std::invalid_argument(path + ": unknown key '" + item.name + "'");
        }
        if (opt->count() == 0) {
            opt->add_result(item.inputs);
            opt->run_callback();
        }
    }
}

void require_input(const Options& o) {
    if (o.cfg.input.empty()) {
        throw std::invalid_argument("--input is required");
    }
}

void finish_options(Options& o) {
    o.cfg.mode = parse_segment_mode(o.mode);
    o.cfg.timing = parse_timing_mode(o.timing);
    o.cfg.solver.sclr.dual_update_mode = parse_dual_update_mode(o.dual_mode);
}

bool has_extension(const std::filesystem::path& p, const char* ext) {
    return p.extension() == ext;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

MetricsReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    if (has_extension(path, ".json")) {
        std::stringstream ss;
        ss << in.rdbuf();
        return report_from_json(ss.str());
    }
    return read_report_csv(in);
}

void print_table(std::ostream& out, const MetricsReport& report) {
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %8s %12s %10s %12s %5s\n", "solver", "ssr%", "mse", "mcc",
                  "cpu_s", "L");
    out << line;
    for (const auto& r : report.rows) {
        std::snprintf(line, sizeof line, "%-12s %8.3f %12.4e %10.6f %12.4e %5zu\n", r.solver.c_str(),
                      r.ssr_percent, r.mse, r.mcc, r.mean_cpu_seconds, r.experiments);
        out << line;
    }
    if (report.partial) {
        out << "(partial)\n";
    }
}

int cmd_ingest(Options& o) {
    finish_options(o);
    const Recording rec = read_edf(o.cfg.input);
    const auto result = segment(rec, o.cfg.segment_length, o.cfg.mode, o.cfg.num_segments,
                                o.cfg.segment_seed, o.cfg.channels);
    export_segments(result.segments, o.out);
    std::cerr << "ingest: " << rec.channels.size() << " channels at " << rec.sample_rate()
              << " Hz, " << result.segments.size() << " segments written";
    if (result.skipped) {
        std::cerr << ", " << result.skipped << " all-zero windows skipped";
    }
    std::cerr << "\n";
    return kOk;
}

int cmd_bench(Options& o) {
    finish_options(o);
    o.cfg.validate();
    if (o.json_out.empty()) {
        o.json_out = std::filesystem::path(o.out).replace_extension(".json");
    }
    const auto segments = load_segments(o.cfg);

    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);
    BenchmarkControl control;
    control.cancel = &g_cancel;
    const BenchmarkResult result = run_benchmark(o.cfg, segments, control);

    std::ostringstream csv;
    write_report_csv(csv, result.report);
    write_text(o.out, csv.str());
    write_text(o.json_out, benchmark_json(o.cfg, result));

    if (result.resumed) {
        std::cerr << "bench: resumed " << result.resumed << " trials from checkpoint\n";
    }
    if (!result.error.empty()) {
        std::cerr << "bench: solver failure: " << result.error << "\n";
        return kFailure;
    }
    if (result.report.partial) {
        std::cerr << "bench: interrupted; partial report written\n";
        return kInterrupted;
    }
    print_table(std::cout, result.report);
    return kOk;
}

int cmd_recover(Options& o) {
    finish_options(o);
    if (!is_known_solver(o.solver)) {
        throw std::invalid_argument("unknown solver '" + o.solver + "'");
    }
    o.cfg.num_segments = o.index + 1;
    const auto segments = load_segments(o.cfg);
    const Matrix& x = segments[o.index].data;
    const Index n = x.rows();
    const Index m = measurements_for(o.ssr, n);
    const SensingMatrix phi = make_gaussian_sensing(m, n, trial_seed(o.cfg.seed_base, o.index, o.ssr));
    const SolverContext context(n, o.cfg.solver);
    const RecoveryResult rec = recover(o.solver, phi.entries() * x, phi, context);

    if (has_extension(o.out, ".csv")) {
        std::ostringstream csv;
        write_matrix_csv(csv, rec.estimate);
        write_text(o.out, csv.str());
    } else {
        save_matrix(o.out, rec.estimate);
    }
    const TrialMetrics tm = trial_metrics(x, rec.estimate);
    const double cells = static_cast<double>(x.size());
    std::cout << "solver " << o.solver << "\nM " << m << "\nmse " << format_double(tm.squared_error / cells)
              << "\nmcc " << format_double(tm.correlation) << "\niterations " << rec.iterations
              << "\nconverged " << (rec.converged ? "yes" : "no") << "\nseconds "
              << format_double(rec.wall_time) << "\n";
    return kOk;
}

int cmd_report(Options& o) {
    MetricsReport merged;
    for (const auto& path : o.reports) {
        MetricsReport r = load_report(path);
        merged.partial = merged.partial || r.partial;
        merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
    }
    merged.sort_rows();
    if (o.out.empty()) {
        print_table(std::cout, merged);
    } else if (has_extension(o.out, ".json")) {
        write_text(o.out, report_json(merged));
    } else {
        std::ostringstream csv;
        write_report_csv(csv, merged);
        write_text(o.out, csv.str());
    }
    return kOk;
}

int cmd_synth(Options& o) {
    save_edf(o.out, make_surrogate_eeg(o.synth));
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    o.cfg.solvers = {"sclr-admm", "somp", "sgap"};

    CLI::App app{"Compressed-sensing recovery benchmarks for EEG"};
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand("ingest", "Cut an EDF recording into a segment container");
    add_data_options(ingest, o);
    ingest->add_option("--out", o.out, "Segment container to write")->required();

    auto* bench = app.add_subcommand("bench", "Sweep solvers over SSRs and write a report");
    std::string config_path;
    bench->add_option("--config", config_path, "key = value file; flags override it")
        ->check(CLI::ExistingFile);
    add_data_options(bench, o);
    add_solver_options(bench, o);
    bench->add_option("--ssr", o.cfg.ssr_list, "Subsampling ratios in percent")->delimiter(',');
    bench->add_option("--solvers", o.cfg.solvers, "Solver names")->delimiter(',');
    bench->add_option("--seed", o.cfg.seed_base, "Base seed for sensing matrices");
    bench->add_option("--out", o.out, "CSV report")->required();
    bench->add_option("--json", o.json_out, "JSON report (default: CSV path with .json)");
    bench->add_flag("--trace", o.cfg.trace, "Keep per-trial solver traces in the JSON report");
    bench->add_option("--timing", o.timing, "wall or none")->check(CLI::IsMember({"wall", "none"}));
    bench->add_option("--workers", o.cfg.workers, "Worker threads; 0 = all cores");
    bench->add_option("--checkpoint", o.cfg.checkpoint, "Trial log used to resume interrupted runs");

    auto* rec = app.add_subcommand("recover", "Recover one segment with one solver");
    add_data_options(rec, o);
    add_solver_options(rec, o);
    rec->add_option("--index", o.index, "Segment index");
    rec->add_option("--solver", o.solver, "Solver name")->required();
    rec->add_option("--ssr", o.ssr, "Subsampling ratio in percent")->check(CLI::Range(0.0, 100.0));
    rec->add_option("--seed", o.cfg.seed_base, "Base seed for the sensing matrix");
    rec->add_option("--out", o.out, "Estimate (.csv for text, binary otherwise)")->required();

    auto* report = app.add_subcommand("report", "Merge and print CSV/JSON reports");
    report->add_option("inputs", o.reports, "Report files")->required()->check(CLI::ExistingFile);
    report->add_option("--out", o.out, "Merged report (.json or .csv)");

    auto* synth = app.add_subcommand("synth", "Write a surrogate EEG recording as EDF");
    synth->add_option("--out", o.out, "EDF file")->required();
    synth->add_option("--channels", o.synth.channels, "Channel count");
    synth->add_option("--seconds", o.synth.seconds, "Duration in seconds");
    synth->add_option("--seed", o.synth.seed, "Generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*bench && !config_path.empty()) {
            apply_config_file(bench, config_path);
        }
        if (*ingest || *bench || *rec) {
            require_input(o);
        }
        if (*ingest) return cmd_ingest(o);
        if (*bench) return cmd_bench(o);
        if (*rec) return cmd_recover(o);
        if (*report) return cmd_report(o);
        if (*synth) return cmd_synth(o);
    } catch (const std::invalid_argument& e) {
        std::cerr << "eegcs: " << e.what() << "\n";
        return kBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "eegcs: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
