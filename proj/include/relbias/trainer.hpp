#pragma once

#include "relbias/datagen.hpp"
#include "relbias/fusion.hpp"
#include "relbias/nn.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace relbias::train {

struct RunResult {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::vector<double> per_epoch_loss;
    std::uint64_t seed = 0;

    bool operator==(const RunResult&) const = default;
};

/// Mini-batch Adam on BCE with a seeded per-epoch shuffle. Throws
/// TrainingDiverged when an epoch loss is not finite.
std::pair<MLPModel, RunResult> train(const ModelSpec& spec, const data::Dataset& train_data,
                                     const nn::TrainConfig& config);

/// Fraction of items whose thresholded prediction (p >= 0.5 means 1) matches the label.
double evaluate(const MLPModel& model, const data::Dataset& data);
double evaluate(const MLPModel& model, const data::EncodedSet& data);

struct TrainTestSplit {
    data::Dataset train;
    data::Dataset test;
};

/// Produces fresh train/test data for one simulation seed.
using DataGenerator = std::function<TrainTestSplit(std::uint64_t seed)>;

struct SimulationSummary {
    std::vector<double> accuracies;       // test accuracy per simulation
    std::vector<double> train_accuracies; // matching train accuracy
    double mean = 0.0;
    double sd = 0.0; // percentage points

    bool operator==(const SimulationSummary&) const = default;
};

/// k runs with seeds base_seed + i. Each run draws its data and its
/// initialization from that seed. Runs may execute on `threads` workers;
/// results stay in simulation order.
SimulationSummary run_simulations(const ModelSpec& spec, const DataGenerator& generator,
                                  const nn::TrainConfig& config, int k = 10, int threads = 1);

/// Seed streams derived from one simulation seed.
std::uint64_t data_seed(std::uint64_t simulation_seed);
std::uint64_t init_seed(std::uint64_t simulation_seed);
std::uint64_t shuffle_seed(std::uint64_t simulation_seed);

} // namespace relbias::train
