#include "relbias/datagen.hpp"

#include "relbias/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <string>

namespace relbias::data {

namespace {

constexpr int kExhaustiveBelow = 10;
constexpr std::size_t kSampledPerClass = 5000;
constexpr std::size_t kCoverageTestEqualMax = 1250;
constexpr std::uint64_t kRejectionBudget = 200'000'000;

void require_dim(int n) {
    if (n < 1) throw ConfigError("vector dimension must be >= 1, got " + std::to_string(n));
}

/// 2^n, saturated for dimensions too large to enumerate.
std::uint64_t space_size(int n) {
    return n >= 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << n);
}

BitVector reversed(const BitVector& bits) {
    return {bits.rbegin(), bits.rend()};
}

int bit_sum(const VectorPair& pair) {
    return std::accumulate(pair.v1.begin(), pair.v1.end(), 0) + std::accumulate(pair.v2.begin(), pair.v2.end(), 0);
}

/// Uniform pair with bit sum <= 2 over all 2n bits.
VectorPair sample_low_sum_pair(int n, Rng& rng) {
    const double m = 2.0 * n;
    const double weights[3] = {1.0, m, m * (m - 1.0) / 2.0};
    const double total = weights[0] + weights[1] + weights[2];
    double u = uniform01(rng) * total;
    int k = 0;
    while (k < 2 && u >= weights[k]) {
        u -= weights[k];
        ++k;
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(2 * n), 0);
    int placed = 0;
    while (placed < k) {
        auto pos = static_cast<std::size_t>(uniform_below(rng, bits.size()));
        if (bits[pos] == 0) {
            bits[pos] = 1;
            ++placed;
        }
    }
    VectorPair pair;
    pair.v1.assign(bits.begin(), bits.begin() + n);
    pair.v2.assign(bits.begin() + n, bits.end());
    return pair;
}

Dataset make_dataset(int n, TaskKind task, std::uint64_t seed, SplitRole role) {
    Dataset d;
    d.n = n;
    d.task = task;
    d.seed = seed;
    d.role = role;
    return d;
}

/// Index lists per class, each in original order.
std::array<std::vector<std::size_t>, 2> class_indices(const Dataset& data) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < data.items.size(); ++i) {
        by_class[data.items[i].label != 0 ? 1 : 0].push_back(i);
    }
    return by_class;
}

Dataset subset(const Dataset& data, std::vector<std::size_t> indices, SplitRole role) {
    std::sort(indices.begin(), indices.end());
    Dataset out = make_dataset(data.n, data.task, data.seed, role);
    out.items.reserve(indices.size());
    for (auto i : indices) {
        out.items.push_back(data.items[i]);
    }
    return out;
}

} // namespace

std::string_view to_string(TaskKind task) {
    switch (task) {
    case TaskKind::equality: return "equality";
    case TaskKind::comparison: return "comparison";
    case TaskKind::digitsum3: return "digitsum3";
    case TaskKind::reversal: return "reversal";
    case TaskKind::parity: return "parity";
    }
    return "?";
}

std::string_view to_string(Representation repr) {
    return repr == Representation::zero_one ? "zero_one" : "sign";
}

std::string_view to_string(CoverageMode mode) {
    switch (mode) {
    case CoverageMode::random: return "random";
    case CoverageMode::one_position: return "one_position";
    case CoverageMode::both_positions: return "both_positions";
    }
    return "?";
}

std::string_view to_string(SplitRole role) {
    switch (role) {
    case SplitRole::full: return "full";
    case SplitRole::train: return "train";
    case SplitRole::test: return "test";
    }
    return "?";
}

TaskKind parse_task(std::string_view name) {
    for (auto t : {TaskKind::equality, TaskKind::comparison, TaskKind::digitsum3, TaskKind::reversal, TaskKind::parity}) {
        if (name == to_string(t)) return t;
    }
    throw UsageError("unknown task '" + std::string(name) +
                     "' (expected equality, comparison, digitsum3, reversal or parity)");
}

Representation parse_representation(std::string_view name) {
    if (name == "zero_one" || name == "0/1") return Representation::zero_one;
    if (name == "sign" || name == "-1/1") return Representation::sign;
    throw UsageError("unknown representation '" + std::string(name) + "' (expected zero_one or sign)");
}

CoverageMode parse_coverage(std::string_view name) {
    for (auto m : {CoverageMode::random, CoverageMode::one_position, CoverageMode::both_positions}) {
        if (name == to_string(m)) return m;
    }
    throw UsageError("unknown coverage mode '" + std::string(name) + "'");
}

std::size_t Dataset::positives() const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [](const LabeledPair& p) { return p.label != 0; }));
}

BitVector parse_bits(std::string_view text) {
    BitVector bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw ConfigError("not a bitstring: '" + std::string(text) + "'");
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    if (bits.empty()) throw ConfigError("empty bitstring");
    return bits;
}

std::string format_bits(const BitVector& bits) {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i) {
        s[i] = bits[i] != 0 ? '1' : '0';
    }
    return s;
}

std::uint64_t bits_to_index(const BitVector& bits) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits.size() && i < 64; ++i) {
        v = (v << 1) | bits[i];
    }
    return v;
}

BitVector index_to_bits(std::uint64_t index, int n) {
    BitVector bits(static_cast<std::size_t>(n), 0);
    for (int i = n - 1; i >= 0 && index != 0; --i) {
        bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(index & 1U);
        index >>= 1;
    }
    return bits;
}

BitVector random_bits(int n, Rng& rng) {
    BitVector bits(static_cast<std::size_t>(n));
    std::uint64_t word = 0;
    for (int i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng();
        bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(word & 1U);
        word >>= 1;
    }
    return bits;
}

VectorPair sample_unequal_pair(int n, Rng& rng) {
    require_dim(n);
    for (;;) {
        VectorPair pair{random_bits(n, rng), random_bits(n, rng)};
        if (pair.v1 != pair.v2) return pair;
    }
}

Dataset gen_equality_dataset(int n, std::uint64_t seed) {
    require_dim(n);
    Rng rng(seed);
    Dataset d = make_dataset(n, TaskKind::equality, seed, SplitRole::full);
    std::size_t per_class = kSampledPerClass;
    if (n < kExhaustiveBelow) {
        per_class = std::size_t{1} << n;
        for (std::uint64_t i = 0; i < per_class; ++i) {
            auto v = index_to_bits(i, n);
            d.items.push_back({{v, v}, 1});
        }
    } else if (space_size(n) >= kSampledPerClass) {
        // Enough vectors exist for distinct equal pairs.
        std::set<BitVector> seen;
        while (d.items.size() < per_class) {
            auto v = random_bits(n, rng);
            if (seen.insert(v).second) d.items.push_back({{v, v}, 1});
        }
    } else {
        for (std::size_t i = 0; i < per_class; ++i) {
            auto v = random_bits(n, rng);
            d.items.push_back({{v, v}, 1});
        }
    }
    for (std::size_t i = 0; i < per_class; ++i) {
        d.items.push_back({sample_unequal_pair(n, rng), 0});
    }
    return d;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie strictly between 0 and 1");
    }
    Rng rng(mix_seed(seed, 0x5b11));
    auto by_class = class_indices(data);
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (int c = 0; c < 2; ++c) {
        auto& idx = by_class[static_cast<std::size_t>(c)];
        shuffle(std::span(idx), rng);
        const auto take = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
        if (take == 0 || take >= idx.size()) {
            throw ConfigError("stratified_split: class " + std::to_string(c) + " with " + std::to_string(idx.size()) +
                              " items cannot be split at fraction " + std::to_string(train_fraction) +
                              " without leaving one part empty");
        }
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
        test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end());
    }
    return {subset(data, std::move(train_idx), SplitRole::train), subset(data, std::move(test_idx), SplitRole::test)};
}

Dataset stratified_take(const Dataset& data, std::size_t per_class, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x7a4e));
    auto by_class = class_indices(data);
    std::vector<std::size_t> picked;
    for (auto& idx : by_class) {
        if (per_class == 0 || per_class > idx.size()) {
            throw ConfigError("stratified_take: cannot take " + std::to_string(per_class) + " items from a class of " +
                              std::to_string(idx.size()));
        }
        shuffle(std::span(idx), rng);
        picked.insert(picked.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(per_class));
    }
    return subset(data, std::move(picked), data.role);
}

std::pair<Dataset, Dataset> gen_coverage_dataset(int n, CoverageMode mode, std::uint64_t seed) {
    require_dim(n);
    if (mode == CoverageMode::random) {
        throw ConfigError("gen_coverage_dataset needs one_position or both_positions; use the equality protocol for random");
    }
    if (n > 62) throw ConfigError("gen_coverage_dataset supports n <= 62");
    Rng rng(seed);
    const std::uint64_t space = space_size(n);
    const std::size_t test_equal = static_cast<std::size_t>(std::clamp<std::uint64_t>(space / 4, 1, kCoverageTestEqualMax));

    Dataset test = make_dataset(n, TaskKind::equality, seed, SplitRole::test);
    std::set<BitVector> equal_pool;
    while (equal_pool.size() < test_equal) {
        auto v = random_bits(n, rng);
        if (equal_pool.insert(v).second) test.items.push_back({{v, v}, 1});
    }
    for (std::size_t i = 0; i < test_equal; ++i) {
        test.items.push_back({sample_unequal_pair(n, rng), 0});
    }

    // Distinct test vectors in first-appearance order.
    std::vector<BitVector> covered;
    std::set<BitVector> covered_set;
    for (const auto& item : test.items) {
        for (const auto* v : {&item.pair.v1, &item.pair.v2}) {
            if (covered_set.insert(*v).second) covered.push_back(*v);
        }
    }
    shuffle(std::span(covered), rng);

    auto outside_covered = [&] {
        if (covered_set.size() >= space) return covered.front();
        for (;;) {
            auto v = random_bits(n, rng);
            if (!covered_set.contains(v)) return v;
        }
    };

    Dataset train = make_dataset(n, TaskKind::equality, seed, SplitRole::train);
    const std::size_t m = covered.size();
    if (mode == CoverageMode::one_position) {
        for (std::size_t i = 0; i + 1 < m; i += 2) {
            train.items.push_back({{covered[i], covered[i + 1]}, 0});
        }
        if (m % 2 == 1) {
            train.items.push_back({{covered[m - 1], outside_covered()}, 0});
        }
    } else if (m == 1) {
        auto other = outside_covered();
        train.items.push_back({{covered[0], other}, 0});
        train.items.push_back({{other, covered[0]}, 0});
    } else {
        // Cyclic chain: each vector once as v1 and once as v2.
        for (std::size_t i = 0; i < m; ++i) {
            train.items.push_back({{covered[i], covered[(i + 1) % m]}, 0});
        }
    }

    const std::size_t negatives = train.items.size();
    for (std::size_t i = 0; i < negatives; ++i) {
        BitVector v;
        do {
            v = random_bits(n, rng);
        } while (equal_pool.contains(v));
        train.items.push_back({{v, v}, 1});
    }
    return {std::move(train), std::move(test)};
}

int label_task(TaskKind task, const VectorPair& pair) {
    switch (task) {
    case TaskKind::equality: return pair.v1 == pair.v2 ? 1 : 0;
    case TaskKind::comparison:
        // Lexicographic order on equal-length MSB-first bit strings is numeric order.
        return pair.v1 < pair.v2 ? 0 : 1;
    case TaskKind::digitsum3: return bit_sum(pair) >= 3 ? 1 : 0;
    case TaskKind::reversal: return pair.v1 == reversed(pair.v2) ? 1 : 0;
    case TaskKind::parity: return bit_sum(pair) % 2;
    }
    return 0;
}

bool class_feasible(TaskKind task, int n, int label) {
    if (n < 1) return false;
    if (task == TaskKind::digitsum3 && label != 0) return 2 * n >= 3;
    return true;
}

Dataset gen_task_dataset(TaskKind task, int n, std::size_t size, std::uint64_t seed) {
    require_dim(n);
    if (size == 0 || size % 2 != 0) throw ConfigError("dataset size must be positive and even");
    for (int label : {0, 1}) {
        if (!class_feasible(task, n, label)) {
            throw ConfigError("task " + std::string(to_string(task)) + " has no class-" + std::to_string(label) +
                              " pairs at n=" + std::to_string(n));
        }
    }
    Rng rng(seed);
    const std::size_t per_class = size / 2;
    std::array<std::vector<LabeledPair>, 2> classes;
    for (auto& c : classes) c.reserve(per_class);

    // Classes that random pairs almost never hit are drawn directly.
    if (task == TaskKind::equality || task == TaskKind::reversal) {
        while (classes[1].size() < per_class) {
            auto v = random_bits(n, rng);
            auto w = task == TaskKind::equality ? v : reversed(v);
            classes[1].push_back({{std::move(v), std::move(w)}, 1});
        }
    }
    if (task == TaskKind::digitsum3) {
        while (classes[0].size() < per_class) {
            classes[0].push_back({sample_low_sum_pair(n, rng), 0});
        }
    }

    std::uint64_t attempts = 0;
    while (classes[0].size() < per_class || classes[1].size() < per_class) {
        if (++attempts > kRejectionBudget) {
            throw ConfigError("gen_task_dataset: rejection sampling budget exhausted for task " +
                              std::string(to_string(task)));
        }
        VectorPair pair{random_bits(n, rng), random_bits(n, rng)};
        const int label = label_task(task, pair);
        auto& bucket = classes[static_cast<std::size_t>(label)];
        if (bucket.size() < per_class) bucket.push_back({std::move(pair), label});
    }

    Dataset d = make_dataset(n, task, seed, SplitRole::full);
    d.items.reserve(size);
    d.items.insert(d.items.end(), classes[1].begin(), classes[1].end());
    d.items.insert(d.items.end(), classes[0].begin(), classes[0].end());
    return d;
}

std::vector<double> encode(const VectorPair& pair, Representation repr) {
    std::vector<double> out;
    out.reserve(pair.v1.size() * 2);
    const double zero = repr == Representation::sign ? -1.0 : 0.0;
    for (const auto* v : {&pair.v1, &pair.v2}) {
        for (auto b : *v) out.push_back(b != 0 ? 1.0 : zero);
    }
    return out;
}

EncodedSet encode_dataset(const Dataset& data, Representation repr) {
    EncodedSet out;
    out.width = static_cast<std::size_t>(2 * data.n);
    out.inputs.reserve(out.width * data.items.size());
    out.labels.reserve(data.items.size());
    for (const auto& item : data.items) {
        if (item.pair.v1.size() != static_cast<std::size_t>(data.n) || item.pair.v2.size() != item.pair.v1.size()) {
            throw ConfigError("encode_dataset: pair dimension differs from dataset dimension");
        }
        auto row = encode(item.pair, repr);
        out.inputs.insert(out.inputs.end(), row.begin(), row.end());
        out.labels.push_back(item.label);
    }
    return out;
}

void write_csv(std::ostream& out, const Dataset& data) {
    out << "v1,v2,label\n";
    for (const auto& item : data.items) {
        out << format_bits(item.pair.v1) << ',' << format_bits(item.pair.v2) << ',' << item.label << '\n';
    }
}

Dataset read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "v1,v2,label") {
        throw ConfigError("dataset CSV must start with the header 'v1,v2,label'");
    }
    Dataset d;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto a = line.find(',');
        const auto b = line.find(',', a == std::string::npos ? a : a + 1);
        if (a == std::string::npos || b == std::string::npos) throw ConfigError("malformed dataset row: " + line);
        LabeledPair item;
        item.pair.v1 = parse_bits(std::string_view(line).substr(0, a));
        item.pair.v2 = parse_bits(std::string_view(line).substr(a + 1, b - a - 1));
        const auto label = std::string_view(line).substr(b + 1);
        if (label != "0" && label != "1") throw ConfigError("label must be 0 or 1: " + line);
        item.label = label == "1" ? 1 : 0;
        if (item.pair.v1.size() != item.pair.v2.size()) throw ConfigError("pair dimensions differ: " + line);
        if (d.items.empty()) {
            d.n = static_cast<int>(item.pair.v1.size());
        } else if (item.pair.v1.size() != static_cast<std::size_t>(d.n)) {
            throw ConfigError("rows have different dimensions");
        }
        d.items.push_back(std::move(item));
    }
    return d;
}

} // namespace relbias::data
