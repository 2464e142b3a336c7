#include "eegcs/eval.hpp"

#include "eegcs/matrix_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace eegcs {
namespace {

void check_inputs(const Matrix& truth, std::span<const Matrix> estimates, const char* who) {
    if (estimates.empty()) {
        throw std::invalid_argument(std::string(who) + ": no estimates");
    }
    for (const auto& e : estimates) {
        if (e.rows() != truth.rows() || e.cols() != truth.cols()) {
            throw DimensionError(std::string(who) + ": estimate is " + std::to_string(e.rows()) +
                                 "x" + std::to_string(e.cols()) + ", truth is " +
                                 std::to_string(truth.rows()) + "x" +
                                 std::to_string(truth.cols()));
        }
    }
}

Matrix normalized(const Matrix& m) {
    const double norm = m.norm();
    return norm > 0.0 ? Matrix(m / norm) : m;
}

} // namespace

double ssr(Index m, Index n) {
    if (m < 1 || n < 1 || m > n) {
        throw DimensionError("ssr requires 1 <= M <= N");
    }
    return 100.0 * static_cast<double>(m) / static_cast<double>(n);
}

double mse(const Matrix& truth, std::span<const Matrix> estimates) {
    check_inputs(truth, estimates, "mse");
    if (!(truth.norm() > 0.0)) {
        throw std::invalid_argument("mse: truth has zero norm");
    }
    const Matrix x = normalized(truth);
    double total = 0.0;
    for (const auto& e : estimates) {
        total += (normalized(e) - x).squaredNorm();
    }
    return total / (static_cast<double>(estimates.size()) * static_cast<double>(truth.size()));
}

double mcc(const Matrix& truth, std::span<const Matrix> estimates) {
    check_inputs(truth, estimates, "mcc");
    const double tn = truth.norm();
    if (!(tn > 0.0)) {
        throw std::invalid_argument("mcc: truth has zero norm");
    }
    double total = 0.0;
    for (const auto& e : estimates) {
        const double en = e.norm();
        if (!(en > 0.0)) {
            throw std::invalid_argument("mcc: estimate has zero norm");
        }
        total += truth.cwiseProduct(e).sum() / (tn * en);
    }
    return total / static_cast<double>(estimates.size());
}

TrialMetrics trial_metrics(const Matrix& truth, const Matrix& estimate) {
    const std::array<Matrix, 1> one = {estimate};
    TrialMetrics m;
    m.squared_error = mse(truth, one) * static_cast<double>(truth.size());
    m.correlation = estimate.norm() > 0.0 ? mcc(truth, one) : 0.0;
    return m;
}

void MetricsReport::sort_rows() {
    std::stable_sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
        return std::tie(a.solver, a.ssr_percent) < std::tie(b.solver, b.ssr_percent);
    });
}

void write_report_csv(std::ostream& out, const MetricsReport& report) {
    out << kReportCsvHeader << '\n';
    for (const auto& r : report.rows) {
        out << r.solver << ',' << format_double(r.ssr_percent) << ',' << format_double(r.mse)
            << ',' << format_double(r.mcc) << ',' << format_double(r.mean_cpu_seconds) << ','
            << r.experiments << ',' << r.seed_base << '\n';
    }
    if (report.partial) {
        out << "# partial=true\n";
    }
}

MetricsReport read_report_csv(std::istream& in) {
    MetricsReport report;
    std::string line;
    if (!std::getline(in, line) || line != kReportCsvHeader) {
        throw FormatError("report CSV must start with '" + std::string(kReportCsvHeader) + "'");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            if (line == "# partial=true") {
                report.partial = true;
            }
            continue;
        }
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (cells.size() != 7) {
            throw FormatError("report CSV row has " + std::to_string(cells.size()) +
                              " cells, expected 7");
        }
        MetricsRow row;
        row.solver = cells[0];
        row.ssr_percent = parse_double(cells[1]);
        row.mse = parse_double(cells[2]);
        row.mcc = parse_double(cells[3]);
        row.mean_cpu_seconds = parse_double(cells[4]);
        try {
            row.experiments = std::stoull(cells[5]);
            row.seed_base = std::stoull(cells[6]);
        } catch (const std::exception&) {
            throw FormatError("report CSV row has a malformed integer field");
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string report_json(const MetricsReport& report) {
    nlohmann::ordered_json doc;
    doc["partial"] = report.partial;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        doc["rows"].push_back({{"solver", r.solver},
                               {"ssr_percent", r.ssr_percent},
                               {"mse", r.mse},
                               {"mcc", r.mcc},
                               {"mean_cpu_seconds", r.mean_cpu_seconds},
                               {"L", r.experiments},
                               {"seed_base", r.seed_base}});
    }
    return doc.dump(2);
}

MetricsReport report_from_json(const std::string& text) {
    MetricsReport report;
    try {
        const auto doc = nlohmann::json::parse(text);
        report.partial = doc.value("partial", false);
        for (const auto& r : doc.at("rows")) {
            MetricsRow row;
            row.solver = r.at("solver").get<std::string>();
            row.ssr_percent = r.at("ssr_percent").get<double>();
            row.mse = r.at("mse").get<double>();
            row.mcc = r.at("mcc").get<double>();
            row.mean_cpu_seconds = r.at("mean_cpu_seconds").get<double>();
            row.experiments = r.at("L").get<std::size_t>();
            row.seed_base = r.at("seed_base").get<std::uint64_t>();
            report.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed report JSON: ") + e.what());
    }
    return report;
}

} // namespace eegcs
