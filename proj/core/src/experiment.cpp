#include "eegcs/experiment.hpp"

#include "eegcs/edf.hpp"
#include "eegcs/matrix_io.hpp"
#include "eegcs/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <thread>
#include <utility>

namespace eegcs {
namespace {

using json = nlohmann::ordered_json;

json params_json(const AdmmParams& p) {
    return json{{"rho", p.rho},
                {"eta", p.eta},
                {"t_max", p.t_max},
                {"inner", {{"mu", p.inner.mu}, {"max_iter", p.inner.max_iter}, {"tol", p.inner.tol}}},
                {"dual_update_mode", to_string(p.dual_update_mode)}};
}

// Everything that determines trial results. Output paths and the worker
// count are deliberately absent.
json config_echo(const ExperimentConfig& cfg) {
    const auto& s = cfg.solver;
    return json{{"input", cfg.input.generic_string()},
                {"mode", to_string(cfg.mode)},
                {"segment_length", cfg.segment_length},
                {"channels", cfg.channels},
                {"num_segments", cfg.num_segments},
                {"ssr", cfg.ssr_list},
                {"solvers", cfg.solvers},
                {"seed_base", cfg.seed_base},
                {"segment_seed", cfg.segment_seed},
                {"timing", to_string(cfg.timing)},
                {"solver_settings",
                 {{"sparsity", s.sparsity},
                  {"greedy_tol", s.greedy_tol},
                  {"breakpoints", s.breakpoints},
                  {"gap_max_iter", s.gap_max_iter},
                  {"sclr", params_json(s.sclr)},
                  {"constrained", params_json(s.constrained)}}}};
}

json trace_json(const std::vector<TraceRecord>& trace) {
    json out = json::array();
    for (const auto& t : trace) {
        out.push_back({t.consensus_residual, t.stopping_statistic, t.objective, t.estimate_norm});
    }
    return out;
}

std::vector<TraceRecord> trace_from_json(const json& j) {
    std::vector<TraceRecord> out;
    for (const auto& t : j) {
        out.push_back({t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>(),
                       t.at(3).get<double>()});
    }
    return out;
}

json trial_json(const TrialRecord& t, bool with_trace) {
    json outcomes = json::array();
    for (const auto& o : t.outcomes) {
        json jo{{"solver", o.solver},
                {"squared_error", o.squared_error},
                {"correlation", o.correlation},
                {"seconds", o.seconds},
                {"iterations", o.iterations},
                {"converged", o.converged}};
        if (with_trace) {
            jo["trace"] = trace_json(o.trace);
        }
        outcomes.push_back(std::move(jo));
    }
    return json{{"segment", t.segment},
                {"ssr_percent", t.ssr_percent},
                {"m", t.m},
                {"seed", t.seed},
                {"outcomes", std::move(outcomes)}};
}

TrialRecord trial_from_json(const json& j) {
    TrialRecord t;
    t.segment = j.at("segment").get<std::size_t>();
    t.ssr_percent = j.at("ssr_percent").get<double>();
    t.m = j.at("m").get<Index>();
    t.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jo : j.at("outcomes")) {
        SolverOutcome o;
        o.solver = jo.at("solver").get<std::string>();
        o.squared_error = jo.at("squared_error").get<double>();
        o.correlation = jo.at("correlation").get<double>();
        o.seconds = jo.at("seconds").get<double>();
        o.iterations = jo.at("iterations").get<int>();
        o.converged = jo.at("converged").get<bool>();
        if (jo.contains("trace")) {
            o.trace = trace_from_json(jo.at("trace"));
        }
        t.outcomes.push_back(std::move(o));
    }
    return t;
}

using JobKey = std::pair<std::size_t, std::size_t>; // (segment, ssr index)

// Reads finished trials from a checkpoint. The first line must carry the
// same config echo; a torn final line (interrupted write) is ignored.
std::map<JobKey, TrialRecord> load_checkpoint(const ExperimentConfig& cfg, const json& echo) {
    std::map<JobKey, TrialRecord> done;
    std::ifstream in(cfg.checkpoint);
    if (!in) {
        return done;
    }
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        return done;
    }
    const json head = json::parse(line, nullptr, false);
    if (head.is_discarded() || !head.contains("config") || head.at("config") != echo) {
        throw std::invalid_argument("checkpoint " + cfg.checkpoint.string() +
                                    " was written by a different configuration");
    }
    while (std::getline(in, line)) {
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            break;
        }
        TrialRecord t = trial_from_json(j);
        const auto it = std::find(cfg.ssr_list.begin(), cfg.ssr_list.end(), t.ssr_percent);
        if (it == cfg.ssr_list.end() || t.segment >= cfg.num_segments) {
            throw std::invalid_argument("checkpoint holds a trial outside the configured sweep");
        }
        const JobKey key{t.segment, static_cast<std::size_t>(it - cfg.ssr_list.begin())};
        done.emplace(key, std::move(t));
    }
    return done;
}

bool has_segment_magic(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    char magic[8] = {};
    in.read(magic, 8);
    return in.gcount() == 8 && std::string(magic, 8) == "EEGCSSEG";
}

} // namespace

std::string to_string(TimingMode mode) {
    return mode == TimingMode::None ? "none" : "wall";
}

TimingMode parse_timing_mode(const std::string& text) {
    if (text == "wall") {
        return TimingMode::WallClock;
    }
    if (text == "none") {
        return TimingMode::None;
    }
    throw std::invalid_argument("unknown timing mode '" + text + "' (expected wall or none)");
}

std::vector<double> default_ssr_grid() {
    std::vector<double> grid;
    for (int s = 10; s <= 50; s += 5) {
        grid.push_back(s);
    }
    return grid;
}

void ExperimentConfig::validate() const {
    if (segment_length < 3) {
        throw std::invalid_argument("segment length must be at least 3");
    }
    if (channels < 0) {
        throw std::invalid_argument("channel count must be non-negative");
    }
    if (num_segments < 1) {
        throw std::invalid_argument("at least one segment is required");
    }
    if (ssr_list.empty()) {
        throw std::invalid_argument("SSR list is empty");
    }
    std::set<double> seen;
    for (double s : ssr_list) {
        if (!(s > 0.0 && s <= 100.0)) {
            throw std::invalid_argument("SSR " + std::to_string(s) + " outside (0, 100]");
        }
        if (!seen.insert(s).second) {
            throw std::invalid_argument("SSR " + std::to_string(s) + " listed twice");
        }
    }
    if (solvers.empty()) {
        throw std::invalid_argument("solver list is empty");
    }
    std::set<std::string> names;
    for (const auto& s : solvers) {
        if (!is_known_solver(s)) {
            throw std::invalid_argument("unknown solver '" + s + "'");
        }
        if (!names.insert(s).second) {
            throw std::invalid_argument("solver '" + s + "' listed twice");
        }
    }
    solver.sclr.validate();
    solver.constrained.validate();
}

Index measurements_for(double ssr_percent, Index n) {
    const auto m = static_cast<Index>(std::llround(ssr_percent * static_cast<double>(n) / 100.0));
    return std::clamp<Index>(m, 1, n);
}

std::uint64_t trial_seed(std::uint64_t seed_base, std::size_t segment, double ssr_percent) {
    return derive_seed(seed_base, segment, std::bit_cast<std::uint64_t>(ssr_percent));
}

std::vector<SignalSegment> load_segments(const ExperimentConfig& cfg) {
    std::vector<SignalSegment> segs;
    if (has_segment_magic(cfg.input)) {
        segs = import_segments(cfg.input);
        if (segs.size() < cfg.num_segments) {
            throw std::invalid_argument(cfg.input.string() + " holds " + std::to_string(segs.size()) +
                                        " segments, " + std::to_string(cfg.num_segments) +
                                        " requested");
        }
        segs.resize(cfg.num_segments);
        for (const auto& s : segs) {
            if (s.data.rows() != cfg.segment_length) {
                throw DimensionError("container segment length " + std::to_string(s.data.rows()) +
                                     " differs from configured " +
                                     std::to_string(cfg.segment_length));
            }
            if (cfg.mode == SegmentMode::SingleChannel && s.data.cols() != 1) {
                throw DimensionError("single-channel mode needs one-column segments");
            }
            if (cfg.channels > 0 && cfg.mode == SegmentMode::MultiChannel &&
                s.data.cols() != cfg.channels) {
                throw DimensionError("container segments have " + std::to_string(s.data.cols()) +
                                     " channels, " + std::to_string(cfg.channels) + " configured");
            }
        }
    } else {
        const Recording rec = read_edf(cfg.input);
        segs = segment(rec, cfg.segment_length, cfg.mode, cfg.num_segments, cfg.segment_seed,
                       cfg.channels)
                   .segments;
    }
    return segs;
}

BenchmarkResult run_benchmark(const ExperimentConfig& cfg, const std::vector<SignalSegment>& segments,
                              const BenchmarkControl& control) {
    cfg.validate();
    if (segments.size() < cfg.num_segments) {
        throw std::invalid_argument("fewer segments than num_segments");
    }
    const Index n = cfg.segment_length;
    const Index r = segments.front().data.cols();
    for (std::size_t l = 0; l < cfg.num_segments; ++l) {
        const Matrix& x = segments[l].data;
        if (x.rows() != n || x.cols() != r) {
            throw DimensionError("segment " + std::to_string(l) + " is " + std::to_string(x.rows()) +
                                 "x" + std::to_string(x.cols()) + ", expected " +
                                 std::to_string(n) + "x" + std::to_string(r));
        }
    }

    const json echo = config_echo(cfg);
    const SolverContext context(n, cfg.solver);
    const std::size_t n_ssr = cfg.ssr_list.size();
    const std::size_t n_jobs = cfg.num_segments * n_ssr;

    std::vector<std::optional<TrialRecord>> slots(n_jobs);
    BenchmarkResult result;
    std::ofstream checkpoint;
    if (!cfg.checkpoint.empty()) {
        for (auto& [key, trial] : load_checkpoint(cfg, echo)) {
            slots[key.first * n_ssr + key.second] = std::move(trial);
            ++result.resumed;
        }
        const bool fresh = result.resumed == 0;
        checkpoint.open(cfg.checkpoint, fresh ? std::ios::trunc : std::ios::app);
        if (!checkpoint) {
            throw std::runtime_error("cannot write checkpoint " + cfg.checkpoint.string());
        }
        if (fresh) {
            checkpoint << json{{"config", echo}}.dump() << '\n' << std::flush;
        }
    }

    std::vector<std::size_t> pending;
    for (std::size_t j = 0; j < n_jobs; ++j) {
        if (!slots[j]) {
            pending.push_back(j);
        }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mutex;

    auto stop_requested = [&] {
        return failed.load() || (control.cancel && control.cancel->load());
    };

    auto run_job = [&](std::size_t job) {
        TrialRecord t;
        t.segment = job / n_ssr;
        t.ssr_percent = cfg.ssr_list[job % n_ssr];
        t.m = measurements_for(t.ssr_percent, n);
        t.seed = trial_seed(cfg.seed_base, t.segment, t.ssr_percent);
        const Matrix& x = segments[t.segment].data;
        const SensingMatrix phi = make_gaussian_sensing(t.m, n, t.seed);
        const Matrix y = phi.entries() * x;
        for (const auto& name : cfg.solvers) {
            const auto start = std::chrono::steady_clock::now();
            RecoveryResult rec = recover(name, y, phi, context);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const TrialMetrics tm = trial_metrics(x, rec.estimate);
            SolverOutcome o;
            o.solver = name;
            o.squared_error = tm.squared_error;
            o.correlation = tm.correlation;
            o.seconds = cfg.timing == TimingMode::None ? 0.0 : secs;
            o.iterations = rec.iterations;
            o.converged = rec.converged;
            if (cfg.trace) {
                o.trace = std::move(rec.trace);
            }
            t.outcomes.push_back(std::move(o));
        }
        return t;
    };

    auto worker = [&] {
        while (!stop_requested()) {
            const std::size_t k = next.fetch_add(1);
            if (k >= pending.size() || (control.max_new_trials && k >= control.max_new_trials)) {
                return;
            }
            const std::size_t job = pending[k];
            try {
                TrialRecord t = run_job(job);
                std::lock_guard lock(mutex);
                if (checkpoint.is_open()) {
                    checkpoint << trial_json(t, cfg.trace).dump() << '\n' << std::flush;
                }
                slots[job] = std::move(t);
            } catch (const std::exception& e) {
                std::lock_guard lock(mutex);
                if (result.error.empty()) {
                    result.error = "segment " + std::to_string(job / n_ssr) + ", SSR " +
                                   format_double(cfg.ssr_list[job % n_ssr]) + ": " + e.what();
                }
                failed = true;
                return;
            }
        }
    };

    std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(pending.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }

    // Aggregation walks trials in (segment, SSR) order so sums are
    // reproducible regardless of which worker finished first.
    const double cells = static_cast<double>(n) * static_cast<double>(r);
    for (const auto& name : cfg.solvers) {
        for (std::size_t s = 0; s < n_ssr; ++s) {
            double se = 0.0;
            double cc = 0.0;
            double secs = 0.0;
            std::size_t count = 0;
            for (std::size_t l = 0; l < cfg.num_segments; ++l) {
                const auto& slot = slots[l * n_ssr + s];
                if (!slot) {
                    continue;
                }
                for (const auto& o : slot->outcomes) {
                    if (o.solver == name) {
                        se += o.squared_error;
                        cc += o.correlation;
                        secs += o.seconds;
                        ++count;
                    }
                }
            }
            if (count == 0) {
                continue;
            }
            const double L = static_cast<double>(count);
            result.report.rows.push_back(
                {name, cfg.ssr_list[s], se / (L * cells), cc / L, secs / L, count, cfg.seed_base});
        }
    }
    result.report.sort_rows();
    for (auto& slot : slots) {
        if (slot) {
            result.trials.push_back(std::move(*slot));
        } else {
            result.report.partial = true;
        }
    }
    return result;
}

std::string benchmark_json(const ExperimentConfig& cfg, const BenchmarkResult& result) {
    json doc = json::parse(report_json(result.report));
    doc["config"] = config_echo(cfg);
    if (!result.error.empty()) {
        doc["error"] = result.error;
    }
    if (cfg.trace) {
        json trials = json::array();
        for (const auto& t : result.trials) {
            trials.push_back(trial_json(t, true));
        }
        doc["trials"] = std::move(trials);
    }
    return doc.dump(2) + "\n";
}

} // namespace eegcs
