#include "relbias/error.hpp"
#include "relbias/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

namespace relbias::exp {

namespace {

/// Shortest representation that parses back to the same double.
std::string exact(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), ptr};
}

std::string fixed(double v, int digits) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*f", digits, v);
    return buf.data();
}

std::string percent(double fraction) {
    return std::to_string(static_cast<long>(std::lround(fraction * 100.0))) + "%";
}

std::string_view column_title(FusionMode f) {
    switch (f) {
    case FusionMode::plain: return "Plain FFNN";
    case FusionMode::early: return "DR Early Fusion";
    case FusionMode::mid: return "DR Mid Fusion";
    }
    return "?";
}

std::string_view sweep_title(SweepKind kind) {
    switch (kind) {
    case SweepKind::dimension: return "Vector dimension";
    case SweepKind::train_fraction: return "Training data";
    case SweepKind::split_ratio: return "Train/test split";
    case SweepKind::coverage: return "Coverage";
    case SweepKind::depth: return "Hidden layers";
    case SweepKind::width: return "Hidden layer size";
    case SweepKind::activation: return "Activation";
    case SweepKind::representation: return "Representation";
    case SweepKind::task: return "Task";
    }
    return "?";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

double parse_field(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError("results CSV: bad number '" + s + "'");
    return v;
}

std::size_t max_simulations(const std::vector<ReportRow>& rows) {
    std::size_t k = 0;
    for (const auto& r : rows) k = std::max(k, r.accuracies.size());
    return k;
}

std::string emit_markdown(const ExperimentReport& report) {
    const auto& spec = report.spec;
    std::ostringstream os;
    os << "### " << spec.id << "\n\n" << spec.description << "\n\n";
    os << "| " << sweep_title(spec.sweep);
    for (auto f : spec.fusion_modes) os << " | " << column_title(f);
    os << " |\n|---";
    for (std::size_t i = 0; i < spec.fusion_modes.size(); ++i) os << "|---:";
    os << "|\n";

    std::vector<double> sd_total(spec.fusion_modes.size(), 0.0);
    std::vector<int> sd_count(spec.fusion_modes.size(), 0);
    for (const auto& v : spec.values) {
        os << "| " << display_value(spec.sweep, v);
        for (std::size_t j = 0; j < spec.fusion_modes.size(); ++j) {
            const auto* row = report.find(v, spec.fusion_modes[j]);
            if (row == nullptr || row->failed) {
                os << " | failed";
                continue;
            }
            os << " | " << percent(row->mean);
            sd_total[j] += row->sd;
            sd_count[j] += 1;
        }
        os << " |\n";
    }
    os << "| SD";
    for (std::size_t j = 0; j < spec.fusion_modes.size(); ++j) {
        os << " | " << (sd_count[j] ? fixed(sd_total[j] / sd_count[j], 2) : std::string("-"));
    }
    os << " |\n";

    if (!report.comparisons.empty()) {
        os << "\n| comparison | W | p | significant |\n|---|---:|---:|---|\n";
        for (const auto& c : report.comparisons) {
            if (!c.error.empty()) {
                os << "| " << c.id << " | - | - | error: " << c.error << " |\n";
                continue;
            }
            os << "| " << c.id << " | " << fixed(c.w_statistic, 1) << " | " << fixed(c.p_value, 4) << " | "
               << (c.significant ? "yes" : "no") << " |\n";
        }
    }
    return os.str();
}

std::string emit_plotdata(const ExperimentReport& report) {
    const auto& spec = report.spec;
    std::ostringstream os;
    os << "# experiment\t" << spec.id << "\n# x\t" << to_string(spec.sweep) << "\n";
    for (auto f : spec.fusion_modes) {
        os << "\n# series\t" << to_string(f) << "\nx\tmean_acc\tsd_pp\n";
        for (const auto& v : spec.values) {
            const auto* row = report.find(v, f);
            if (row == nullptr || row->failed) continue;
            os << v << '\t' << exact(row->mean) << '\t' << exact(row->sd) << '\n';
        }
    }
    return os.str();
}

std::string emit_summary(const ExperimentReport& report) {
    std::ostringstream os;
    os << "experiment,sweep_value,fusion,mean_acc,sd,train_converged,simulations\n";
    for (const auto& r : report.rows) {
        os << r.experiment << ',' << r.sweep_value << ',' << to_string(r.fusion) << ',';
        if (r.failed) {
            os << "NA,NA,0,0\n";
            continue;
        }
        const auto converged = std::count(r.train_accuracies.begin(), r.train_accuracies.end(), 1.0);
        os << exact(r.mean) << ',' << exact(r.sd) << ',' << converged << ',' << r.accuracies.size() << '\n';
    }
    return os.str();
}

std::string emit_significance(const ExperimentReport& report) {
    std::ostringstream os;
    os << "comparison,W,p,significant\n";
    for (const auto& c : report.comparisons) {
        if (!c.error.empty()) {
            os << c.id << ",NA,NA,NA\n";
            continue;
        }
        os << c.id << ',' << exact(c.w_statistic) << ',' << exact(c.p_value) << ','
           << (c.significant ? "true" : "false") << '\n';
    }
    return os.str();
}

} // namespace

std::string display_value(SweepKind kind, const std::string& value) {
    switch (kind) {
    case SweepKind::dimension: return "n=" + value;
    case SweepKind::depth: return "h=" + value;
    case SweepKind::width: return "h_n=" + value;
    case SweepKind::train_fraction: return std::to_string(std::lround(parse_field(value) * 100.0)) + "%";
    case SweepKind::split_ratio: {
        const auto train = std::lround(parse_field(value) * 100.0);
        return std::to_string(train) + "/" + std::to_string(100 - train);
    }
    case SweepKind::representation: return value == "sign" ? "-1/1" : "0/1";
    default: return value;
    }
}

ReportFormat parse_format(std::string_view name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    if (name == "plotdata") return ReportFormat::plotdata;
    if (name == "summary") return ReportFormat::summary;
    if (name == "significance") return ReportFormat::significance;
    throw UsageError("unknown format '" + std::string(name) + "' (expected csv, markdown or plotdata)");
}

std::string_view file_extension(ReportFormat format) {
    switch (format) {
    case ReportFormat::markdown: return ".md";
    case ReportFormat::plotdata: return ".tsv";
    default: return ".csv";
    }
}

std::string emit_rows_csv(const std::vector<ReportRow>& rows) {
    if (rows.empty()) throw UsageError("emit_report: no rows");
    const std::size_t k = max_simulations(rows);
    std::ostringstream os;
    os << "experiment,sweep_value,fusion,mean_acc,sd";
    for (std::size_t i = 1; i <= k; ++i) os << ",acc_" << i;
    os << '\n';
    for (const auto& r : rows) {
        os << r.experiment << ',' << r.sweep_value << ',' << to_string(r.fusion) << ',';
        if (r.failed) {
            os << "NA,NA";
            for (std::size_t i = 0; i < k; ++i) os << ',';
        } else {
            os << exact(r.mean) << ',' << exact(r.sd);
            for (std::size_t i = 0; i < k; ++i) {
                os << ',';
                if (i < r.accuracies.size()) os << exact(r.accuracies[i]);
            }
        }
        os << '\n';
    }
    return os.str();
}

std::vector<ReportRow> parse_rows_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("results CSV is empty");
    const auto header = split_csv_line(line);
    if (header.size() < 5 || header[0] != "experiment" || header[1] != "sweep_value" || header[2] != "fusion" ||
        header[3] != "mean_acc" || header[4] != "sd") {
        throw ConfigError("results CSV header must start with experiment,sweep_value,fusion,mean_acc,sd");
    }
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) throw ConfigError("results CSV: row has " + std::to_string(f.size()) + " fields");
        ReportRow r;
        r.experiment = f[0];
        r.sweep_value = f[1];
        r.fusion = parse_fusion(f[2]);
        if (f[3] == "NA") {
            r.failed = true;
        } else {
            r.mean = parse_field(f[3]);
            r.sd = parse_field(f[4]);
            for (std::size_t i = 5; i < f.size(); ++i) {
                if (!f[i].empty()) r.accuracies.push_back(parse_field(f[i]));
            }
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string emit_report(const ExperimentReport& report, ReportFormat format) {
    if (report.rows.empty()) throw UsageError("emit_report: no rows");
    switch (format) {
    case ReportFormat::csv: return emit_rows_csv(report.rows);
    case ReportFormat::markdown: return emit_markdown(report);
    case ReportFormat::plotdata: return emit_plotdata(report);
    case ReportFormat::summary: return emit_summary(report);
    case ReportFormat::significance: return emit_significance(report);
    }
    throw UsageError("unknown format");
}

} // namespace relbias::exp
