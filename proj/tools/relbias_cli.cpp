// relbias: command-line front end over the C API.

#include "relbias/relbias.h"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct OptionsDeleter {
    void operator()(rb_run_options* p) const { rb_run_options_free(p); }
};
struct ReportDeleter {
    void operator()(rb_report* p) const { rb_report_free(p); }
};
struct DatasetDeleter {
    void operator()(rb_dataset* p) const { rb_dataset_free(p); }
};
struct StringDeleter {
    void operator()(char* p) const { rb_string_free(p); }
};

using OptionsPtr = std::unique_ptr<rb_run_options, OptionsDeleter>;
using ReportPtr = std::unique_ptr<rb_report, ReportDeleter>;
using DatasetPtr = std::unique_ptr<rb_dataset, DatasetDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

/// Thrown to unwind with an rb_status already reported.
struct Failure {
    rb_status status;
};

void check(rb_status status) {
    if (status != RB_OK) {
        std::cerr << "relbias: " << rb_last_error() << '\n';
        throw Failure{status};
    }
}

int exit_code(rb_status status) { return status == RB_ERR_USAGE ? kExitUsage : kExitFailure; }

struct RunArgs {
    std::optional<std::string> seed;
    std::optional<int> sims;
    std::optional<int> threads;
    std::optional<std::string> config;
    std::string format = "csv";
    std::string out_dir;
};

/// Environment default, then config file, then explicit flags.
OptionsPtr make_options(const RunArgs& args) {
    rb_run_options* raw = nullptr;
    check(rb_run_options_create(&raw));
    OptionsPtr options(raw);
    if (const char* env = std::getenv("RELBIAS_SEED"); env != nullptr && *env != '\0') {
        check(rb_run_options_set(options.get(), "seed", env));
    }
    if (args.config) check(rb_run_options_load_config(options.get(), args.config->c_str()));
    if (args.seed) check(rb_run_options_set(options.get(), "seed", args.seed->c_str()));
    if (args.sims) check(rb_run_options_set(options.get(), "sims", std::to_string(*args.sims).c_str()));
    if (args.threads) check(rb_run_options_set(options.get(), "threads", std::to_string(*args.threads).c_str()));
    return options;
}

std::string emit(const rb_report* report, const std::string& format) {
    char* raw = nullptr;
    check(rb_report_emit(report, format.c_str(), &raw));
    StringPtr text(raw);
    return text.get();
}

std::string extension(const std::string& format) {
    if (format == "markdown" || format == "md") return ".md";
    if (format == "plotdata") return ".tsv";
    return ".csv";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        std::cerr << "relbias: cannot write " << path.string() << '\n';
        throw Failure{RB_ERR_IO};
    }
}

ReportPtr run_one(const std::string& id, const rb_run_options* options) {
    rb_report* raw = nullptr;
    check(rb_experiment_run(id.c_str(), options, &raw));
    return ReportPtr(raw);
}

void report_failed_rows(const rb_report* report) {
    for (size_t i = 0; i < rb_report_row_count(report); ++i) {
        rb_row_info info{};
        check(rb_report_row(report, i, &info));
        if (info.failed) {
            std::cerr << "relbias: " << rb_report_id(report) << " " << info.sweep_value << "/" << info.fusion
                      << " failed: " << info.error << '\n';
        }
    }
}

void cmd_list() {
    for (size_t i = 0; i < rb_catalog_size(); ++i) {
        std::cout << rb_catalog_id(i) << '\t' << rb_catalog_description(i) << '\n';
    }
}

void cmd_run(const std::string& id, const RunArgs& args) {
    auto options = make_options(args);
    auto report = run_one(id, options.get());
    report_failed_rows(report.get());
    const auto text = emit(report.get(), args.format);
    if (args.out_dir.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path dir(args.out_dir);
    write_file(dir / (id + extension(args.format)), text);
    if (args.format != "csv") write_file(dir / (id + ".csv"), emit(report.get(), "csv"));
    std::cerr << "wrote " << (dir / (id + extension(args.format))).string() << '\n';
}

void cmd_run_all(const RunArgs& args) {
    auto options = make_options(args);
    const std::filesystem::path dir(args.out_dir.empty() ? "results" : args.out_dir);
    std::filesystem::create_directories(dir);
    std::string summary;
    std::string significance;
    for (size_t i = 0; i < rb_catalog_size(); ++i) {
        const std::string id = rb_catalog_id(i);
        std::cerr << "running " << id << "...\n";
        auto report = run_one(id, options.get());
        report_failed_rows(report.get());
        write_file(dir / (id + ".csv"), emit(report.get(), "csv"));
        if (args.format != "csv") write_file(dir / (id + extension(args.format)), emit(report.get(), args.format));
        auto part = emit(report.get(), "summary");
        auto sig = emit(report.get(), "significance");
        // Keep a single header line in the combined files.
        if (!summary.empty()) part.erase(0, part.find('\n') + 1);
        if (!significance.empty()) sig.erase(0, sig.find('\n') + 1);
        summary += part;
        significance += sig;
    }
    write_file(dir / "summary.csv", summary);
    write_file(dir / "significance.csv", significance);
    std::cerr << "wrote " << dir.string() << '\n';
}

void cmd_gen_data(const std::string& task, int n, const std::string& out, std::size_t size, std::uint64_t seed) {
    rb_dataset* raw = nullptr;
    check(rb_dataset_generate(task.c_str(), n, size, seed, &raw));
    DatasetPtr dataset(raw);
    if (out == "-") {
        char* text = nullptr;
        check(rb_dataset_emit_csv(dataset.get(), &text));
        StringPtr owned(text);
        std::cout << owned.get();
        return;
    }
    check(rb_dataset_write_csv(dataset.get(), out.c_str()));
    std::cerr << "wrote " << rb_dataset_size(dataset.get()) << " pairs to " << out << '\n';
}

void cmd_stats_compare(const std::string& a, const std::string& b, const std::optional<std::string>& fusion,
                       double alpha) {
    rb_wilcoxon_result result{};
    check(rb_stats_compare_csv(a.c_str(), b.c_str(), fusion ? fusion->c_str() : nullptr, alpha, &result));
    const std::string id = std::filesystem::path(a).stem().string() + "-vs-" + std::filesystem::path(b).stem().string() +
                           (fusion ? "/" + *fusion : std::string());
    std::printf("comparison,W,p,significant\n%s,%.17g,%.17g,%s\n", id.c_str(), result.w_statistic, result.p_value,
                result.significant ? "true" : "false");
}

void add_run_flags(CLI::App* cmd, RunArgs& args) {
    cmd->add_option("--seed", args.seed, "Base seed (default: RELBIAS_SEED or the catalog seed)");
    cmd->add_option("--sims", args.sims, "Simulations per cell")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", args.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--config", args.config, "key=value overrides file")->check(CLI::ExistingFile);
    cmd->add_option("--format", args.format, "csv, markdown or plotdata")
        ->check(CLI::IsMember({"csv", "markdown", "md", "plotdata"}));
    cmd->add_option("--out", args.out_dir, "Output directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Identity-relation generalisation experiments with differentiator-rectifier units"};
    app.require_subcommand(1);

    app.add_subcommand("list", "List the built-in experiments");

    RunArgs run_args;
    std::string run_id;
    auto* run = app.add_subcommand("run", "Run one experiment");
    run->add_option("id", run_id, "Experiment id (see `list`)")->required();
    add_run_flags(run, run_args);

    RunArgs all_args;
    auto* run_all = app.add_subcommand("run-all", "Run every experiment into --out (default ./results)");
    add_run_flags(run_all, all_args);

    std::string task;
    int n = 0;
    std::string data_out;
    std::size_t size = 0;
    std::uint64_t data_seed = 1;
    auto* gen = app.add_subcommand("gen-data", "Write a generated dataset as CSV");
    gen->add_option("task", task, "equality, comparison, digitsum3, reversal or parity")->required();
    gen->add_option("n", n, "Vector dimension")->required();
    gen->add_option("--out", data_out, "Output CSV path, '-' for stdout")->required();
    gen->add_option("--size", size, "Pairs to generate (0 = standard equality protocol)");
    gen->add_option("--seed", data_seed, "Generation seed");

    std::string csv_a;
    std::string csv_b;
    std::optional<std::string> fusion;
    double alpha = 0.05;
    auto* stats = app.add_subcommand("stats", "Statistics on result files");
    stats->require_subcommand(1);
    auto* compare = stats->add_subcommand("compare", "Wilcoxon signed-rank test between two results CSVs");
    compare->add_option("csvA", csv_a)->required()->check(CLI::ExistingFile);
    compare->add_option("csvB", csv_b)->required()->check(CLI::ExistingFile);
    compare->add_option("--fusion", fusion, "Only rows of this fusion mode");
    compare->add_option("--alpha", alpha, "Significance threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand("list")) {
            cmd_list();
        } else if (run->parsed()) {
            cmd_run(run_id, run_args);
        } else if (run_all->parsed()) {
            cmd_run_all(all_args);
        } else if (gen->parsed()) {
            cmd_gen_data(task, n, data_out, size, data_seed);
        } else if (compare->parsed()) {
            cmd_stats_compare(csv_a, csv_b, fusion, alpha);
        }
    } catch (const Failure& f) {
        return exit_code(f.status);
    } catch (const std::exception& e) {
        std::cerr << "relbias: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
