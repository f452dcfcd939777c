#include "relbias/stats.hpp"

#include "relbias/error.hpp"
#include "relbias/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace relbias::stats {

std::string_view to_string(WilcoxonMethod method) {
    return method == WilcoxonMethod::exact ? "exact" : "normal_approximation";
}

SignedRanks signed_ranks(std::span<const double> differences) {
    std::vector<double> magnitudes;
    SignedRanks out;
    for (double d : differences) {
        if (d == 0.0) continue;
        magnitudes.push_back(std::abs(d));
        out.signs.push_back(d > 0.0 ? 1 : -1);
    }
    const std::size_t m = magnitudes.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return magnitudes[x] < magnitudes[y]; });
    out.ranks.assign(m, 0.0);
    for (std::size_t i = 0; i < m;) {
        std::size_t j = i;
        while (j + 1 < m && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = mid;
        i = j + 1;
    }
    return out;
}

namespace {

/// Two-sided p from the exact null distribution of W+, built by counting
/// sign assignments over doubled (integer) ranks.
double exact_p_value(std::span<const double> ranks, double w_plus) {
    std::vector<long> doubled;
    long total = 0;
    for (double r : ranks) {
        doubled.push_back(std::lround(2.0 * r));
        total += doubled.back();
    }
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    long reach = 0;
    for (long r : doubled) {
        for (long s = reach; s >= 0; --s) {
            counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
        }
        reach += r;
    }
    const long observed = std::lround(2.0 * w_plus);
    double lower = 0.0;
    double upper = 0.0;
    for (long s = 0; s <= total; ++s) {
        if (s <= observed) lower += counts[static_cast<std::size_t>(s)];
        if (s >= observed) upper += counts[static_cast<std::size_t>(s)];
    }
    const double assignments = std::ldexp(1.0, static_cast<int>(ranks.size()));
    return std::min(1.0, 2.0 * std::min(lower, upper) / assignments);
}

double normal_p_value(std::span<const double> ranks, double w_plus) {
    const auto n = static_cast<double>(ranks.size());
    const double mean = n * (n + 1.0) / 4.0;
    double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    std::vector<double> sorted(ranks.begin(), ranks.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const auto t = static_cast<double>(j - i);
        variance -= (t * t * t - t) / 48.0;
        i = j;
    }
    if (variance <= 0.0) return 1.0;
    const double z = (std::abs(w_plus - mean) - 0.5) / std::sqrt(variance);
    if (z <= 0.0) return 1.0;
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

} // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ConfigError("wilcoxon_signed_rank: samples of length " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()));
    }
    if (a.empty()) throw ConfigError("wilcoxon_signed_rank: empty samples");
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];

    const auto sr = signed_ranks(diff);
    WilcoxonResult result;
    result.n_effective = sr.ranks.size();
    if (result.n_effective == 0) return result;

    double w_plus = 0.0;
    double w_minus = 0.0;
    for (std::size_t i = 0; i < sr.ranks.size(); ++i) {
        (sr.signs[i] > 0 ? w_plus : w_minus) += sr.ranks[i];
    }
    result.w_plus = w_plus;
    result.w_statistic = std::min(w_plus, w_minus);
    if (result.n_effective <= kExactLimit) {
        result.method = WilcoxonMethod::exact;
        result.p_value = exact_p_value(sr.ranks, w_plus);
    } else {
        result.method = WilcoxonMethod::normal_approximation;
        result.p_value = normal_p_value(sr.ranks, w_plus);
    }
    return result;
}

Summary summarize(std::span<const double> accuracies) {
    if (accuracies.empty()) throw ConfigError("summarize: no values");
    Summary s;
    const auto n = static_cast<double>(accuracies.size());
    s.mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / n;
    if (accuracies.size() > 1) {
        double ss = 0.0;
        for (double a : accuracies) ss += (a - s.mean) * (a - s.mean);
        s.sd_pp = 100.0 * std::sqrt(ss / (n - 1.0));
    }
    return s;
}

GroupComparison compare_pooled(std::span<const std::vector<double>> group_a,
                               std::span<const std::vector<double>> group_b, double alpha) {
    if (group_a.empty() || group_b.empty()) throw ConfigError("compare_groups: groups must be non-empty");
    std::vector<double> pooled_a;
    std::vector<double> pooled_b;
    for (const auto& g : group_a) pooled_a.insert(pooled_a.end(), g.begin(), g.end());
    for (const auto& g : group_b) pooled_b.insert(pooled_b.end(), g.begin(), g.end());
    if (pooled_a.size() != pooled_b.size()) {
        throw ConfigError("compare_groups: pooled sizes differ (" + std::to_string(pooled_a.size()) + " vs " +
                          std::to_string(pooled_b.size()) + ")");
    }
    const auto w = wilcoxon_signed_rank(pooled_a, pooled_b);
    return {w.w_statistic, w.p_value, w.p_value < alpha, pooled_a.size()};
}

GroupComparison compare_groups(std::span<const train::SimulationSummary> group_a,
                               std::span<const train::SimulationSummary> group_b, double alpha) {
    std::vector<std::vector<double>> a;
    std::vector<std::vector<double>> b;
    for (const auto& s : group_a) a.push_back(s.accuracies);
    for (const auto& s : group_b) b.push_back(s.accuracies);
    return compare_pooled(a, b, alpha);
}

} // namespace relbias::stats
