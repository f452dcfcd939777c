#pragma once

// Declarative experiment catalog, grid runner and report writers.

#include "relbias/datagen.hpp"
#include "relbias/fusion.hpp"
#include "relbias/nn.hpp"
#include "relbias/trainer.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relbias::exp {

enum class SweepKind { dimension, train_fraction, split_ratio, coverage, depth, width, activation, representation, task };

std::string_view to_string(SweepKind kind);

/// One grid cell, addressed by sweep value and fusion mode.
struct CellRef {
    std::string value;
    FusionMode fusion = FusionMode::plain;
};

/// Signed-rank test between two pooled groups of cells.
struct ComparisonSpec {
    std::string id;
    std::vector<CellRef> group_a;
    std::vector<CellRef> group_b;
};

struct ExperimentSpec {
    std::string id;
    std::string description;
    data::TaskKind task = data::TaskKind::equality;
    SweepKind sweep = SweepKind::dimension;
    std::vector<std::string> values;
    ModelSpec model;           // fusion is overwritten per cell
    nn::TrainConfig train;     // seed is ignored; base_seed drives every run
    double split_fraction = 0.75;
    std::size_t task_size = 10000;
    std::vector<FusionMode> fusion_modes{FusionMode::plain, FusionMode::early, FusionMode::mid};
    int simulations = 10;
    std::uint64_t base_seed = 1;
    std::vector<ComparisonSpec> comparisons;

    /// Throws ConfigError.
    void validate() const;
};

/// The built-in experiments.
const std::vector<ExperimentSpec>& catalog();

/// Throws UsageError listing the valid ids when `id` is unknown.
const ExperimentSpec& find_experiment(std::string_view id);

/// Overrides from the CLI, a key=value config file or the C API.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> simulations;
    std::optional<int> epochs;
    std::optional<double> learning_rate;
    std::optional<int> batch_size;
    int threads = 1;

    /// Accepts seed, sims, threads, epochs, learning_rate, batch_size.
    /// Throws ConfigError for unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    /// Parses `key = value` lines; '#' starts a comment.
    void load(std::istream& in);
    void load_file(const std::string& path);

    ExperimentSpec apply(ExperimentSpec spec) const;
};

/// Model and data generator for one cell.
struct CellSetup {
    ModelSpec model;
    train::DataGenerator generator;
};

CellSetup make_cell(const ExperimentSpec& spec, const std::string& value, FusionMode fusion);

struct ReportRow {
    std::string experiment;
    std::string sweep_value;
    FusionMode fusion = FusionMode::plain;
    double mean = 0.0;
    double sd = 0.0; // percentage points
    std::vector<double> accuracies;
    std::vector<double> train_accuracies; // not serialized to CSV
    bool failed = false;
    std::string error;

    /// Equality over the CSV-visible fields.
    bool same_serialized(const ReportRow& other) const;
};

struct ComparisonResult {
    std::string id;
    double w_statistic = 0.0;
    double p_value = 1.0;
    bool significant = false;
    std::size_t pooled_size = 0;
    std::string error;
};

struct ExperimentReport {
    ExperimentSpec spec;
    std::vector<ReportRow> rows;
    std::vector<ComparisonResult> comparisons;

    const ReportRow* find(const std::string& value, FusionMode fusion) const;
};

/// Runs every (sweep value x fusion mode) cell. A cell whose training fails
/// is marked failed; the other cells still run.
ExperimentReport run_experiment(const ExperimentSpec& spec, int threads = 1);

enum class ReportFormat { csv, markdown, plotdata, summary, significance };

ReportFormat parse_format(std::string_view name);
std::string_view file_extension(ReportFormat format);

std::string emit_report(const ExperimentReport& report, ReportFormat format);
std::string emit_rows_csv(const std::vector<ReportRow>& rows);
/// Inverse of emit_rows_csv.
std::vector<ReportRow> parse_rows_csv(std::istream& in);

/// Label used in markdown tables ("n=10", "75/25", ...).
std::string display_value(SweepKind kind, const std::string& value);

} // namespace relbias::exp
