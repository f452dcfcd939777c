#pragma once

// Wilcoxon signed-rank test and accuracy summaries.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace relbias::train {
struct SimulationSummary;
}

namespace relbias::stats {

enum class WilcoxonMethod { exact, normal_approximation };

std::string_view to_string(WilcoxonMethod method);

struct WilcoxonResult {
    double w_statistic = 0.0; // min(W+, W-)
    double w_plus = 0.0;      // rank sum of positive differences
    double p_value = 1.0;     // two-sided
    std::size_t n_effective = 0;
    WilcoxonMethod method = WilcoxonMethod::exact;
};

/// Largest number of nonzero differences handled with the exact null distribution.
inline constexpr std::size_t kExactLimit = 25;

/// Ranks of |d| over the nonzero differences, ties sharing their mid-rank.
/// Zero differences are dropped; returns (abs-ranks, signs) in input order.
struct SignedRanks {
    std::vector<double> ranks;
    std::vector<int> signs;
};
SignedRanks signed_ranks(std::span<const double> differences);

/// Paired two-sided test on a - b. Throws ConfigError on length mismatch or
/// empty input. All-zero differences give p = 1 with n_effective = 0.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

struct Summary {
    double mean = 0.0;  // same unit as the input
    double sd_pp = 0.0; // sample SD in percentage points (input * 100)
};

/// Throws ConfigError on empty input. One value gives sd 0.
Summary summarize(std::span<const double> accuracies);

struct GroupComparison {
    double w_statistic = 0.0;
    double p_value = 1.0;
    bool significant = false;
    std::size_t pooled_size = 0;
};

/// Pools each group's accuracy lists in the given order and runs the
/// signed-rank test between the two pooled lists.
GroupComparison compare_pooled(std::span<const std::vector<double>> group_a,
                               std::span<const std::vector<double>> group_b, double alpha = 0.05);

/// compare_pooled over the per-simulation accuracies of each summary,
/// e.g. two configurations x 10 simulations = 20 paired values.
GroupComparison compare_groups(std::span<const train::SimulationSummary> group_a,
                               std::span<const train::SimulationSummary> group_b, double alpha = 0.05);

} // namespace relbias::stats
