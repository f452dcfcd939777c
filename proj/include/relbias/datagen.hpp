#pragma once

// Synthetic binary-vector-pair datasets: the equality protocol, coverage
// variants, the alternative tasks, encoding and stratified splitting.

#include "relbias/random.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relbias::data {

/// Bits stored as 0/1 bytes, most significant first.
using BitVector = std::vector<std::uint8_t>;

struct VectorPair {
    BitVector v1;
    BitVector v2;

    std::size_t dim() const { return v1.size(); }
    bool operator==(const VectorPair&) const = default;
    auto operator<=>(const VectorPair&) const = default;
};

struct LabeledPair {
    VectorPair pair;
    int label = 0;

    bool operator==(const LabeledPair&) const = default;
    auto operator<=>(const LabeledPair&) const = default;
};

enum class TaskKind { equality, comparison, digitsum3, reversal, parity };
enum class Representation { zero_one, sign };
enum class CoverageMode { random, one_position, both_positions };
enum class SplitRole { full, train, test };

std::string_view to_string(TaskKind task);
std::string_view to_string(Representation repr);
std::string_view to_string(CoverageMode mode);
std::string_view to_string(SplitRole role);
TaskKind parse_task(std::string_view name);
Representation parse_representation(std::string_view name);
CoverageMode parse_coverage(std::string_view name);

struct Dataset {
    std::vector<LabeledPair> items;
    int n = 0;
    TaskKind task = TaskKind::equality;
    std::uint64_t seed = 0;
    SplitRole role = SplitRole::full;

    std::size_t size() const { return items.size(); }
    std::size_t positives() const;
    std::size_t negatives() const { return items.size() - positives(); }
};

/// Bits of a string like "0110". Throws ConfigError on other characters.
BitVector parse_bits(std::string_view text);
std::string format_bits(const BitVector& bits);

/// Integer value of the first 64 bits, most significant first.
std::uint64_t bits_to_index(const BitVector& bits);
BitVector index_to_bits(std::uint64_t index, int n);

BitVector random_bits(int n, Rng& rng);

/// Uniform i.i.d. pair from {0,1}^n, redrawn until v1 != v2.
VectorPair sample_unequal_pair(int n, Rng& rng);

/// All 2^n equal pairs plus as many unequal ones for n < 10; 5000 + 5000
/// sampled pairs for n >= 10.
Dataset gen_equality_dataset(int n, std::uint64_t seed);

/// Per-class stratified split. Throws ConfigError when either part would
/// lack a class or the fraction is outside (0, 1).
std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double train_fraction, std::uint64_t seed);

/// `per_class` items of each class. Subsets for growing `per_class` under one
/// seed are nested.
Dataset stratified_take(const Dataset& data, std::size_t per_class, std::uint64_t seed);

/// Train/test sets in which every test-set vector also occurs inside the
/// training unequal pairs (once, or once per position).
std::pair<Dataset, Dataset> gen_coverage_dataset(int n, CoverageMode mode, std::uint64_t seed);

int label_task(TaskKind task, const VectorPair& pair);

/// Class-balanced dataset of `size` pairs for any task.
Dataset gen_task_dataset(TaskKind task, int n, std::size_t size, std::uint64_t seed);

/// True when `task` has at least one pair of class `label` at dimension n.
bool class_feasible(TaskKind task, int n, int label);

/// Input layout [v1, v2] as reals; sign maps 0 to -1.
std::vector<double> encode(const VectorPair& pair, Representation repr);

/// Row-major encoded inputs with labels, ready for training.
struct EncodedSet {
    std::size_t width = 0;
    std::vector<double> inputs;
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const { return {inputs.data() + i * width, width}; }
};

EncodedSet encode_dataset(const Dataset& data, Representation repr);

/// CSV with header `v1,v2,label`.
void write_csv(std::ostream& out, const Dataset& data);
Dataset read_csv(std::istream& in);

} // namespace relbias::data
