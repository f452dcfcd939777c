#include "relbias/trainer.hpp"

#include "relbias/error.hpp"
#include "relbias/parallel.hpp"
#include "relbias/random.hpp"
#include "relbias/stats.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace relbias::train {

std::uint64_t data_seed(std::uint64_t simulation_seed) { return mix_seed(simulation_seed, 1); }
std::uint64_t init_seed(std::uint64_t simulation_seed) { return mix_seed(simulation_seed, 2); }
std::uint64_t shuffle_seed(std::uint64_t simulation_seed) { return mix_seed(simulation_seed, 3); }

std::pair<MLPModel, RunResult> train(const ModelSpec& spec, const data::Dataset& train_data,
                                     const nn::TrainConfig& config) {
    config.validate();
    spec.validate();
    if (train_data.n != spec.vector_dim) {
        throw ConfigError("training data has dimension " + std::to_string(train_data.n) + " but the model expects " +
                          std::to_string(spec.vector_dim));
    }
    if (train_data.items.empty()) throw ConfigError("training data is empty");

    const auto encoded = data::encode_dataset(train_data, spec.representation);
    MLPModel model = build_model(spec, init_seed(config.seed));
    nn::OptimizerState optimizer(model.layers());
    Rng rng(shuffle_seed(config.seed));

    std::vector<std::size_t> order(encoded.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto batch_size = static_cast<std::size_t>(config.batch_size);
    std::vector<Example> batch;
    batch.reserve(batch_size);
    nn::Gradients grads;

    RunResult result;
    result.seed = config.seed;
    result.per_epoch_loss.reserve(static_cast<std::size_t>(config.epochs));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(std::span(order), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(order.size(), start + batch_size);
            batch.clear();
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back({encoded.row(order[i]), encoded.labels[order[i]]});
            }
            const double loss = model.backward(batch, grads);
            epoch_loss += loss * static_cast<double>(batch.size());
            nn::optimizer_step(optimizer, model.mutable_layers(), grads, config.learning_rate);
        }
        epoch_loss /= static_cast<double>(order.size());
        if (!std::isfinite(epoch_loss)) {
            throw TrainingDiverged("non-finite training loss in epoch " + std::to_string(epoch + 1) + " (" +
                                   spec.describe() + ", seed " + std::to_string(config.seed) + ")");
        }
        result.per_epoch_loss.push_back(epoch_loss);
    }
    result.train_accuracy = evaluate(model, encoded);
    return {std::move(model), std::move(result)};
}

double evaluate(const MLPModel& model, const data::EncodedSet& data) {
    if (data.size() == 0) return 0.0;
    if (data.width != model.spec().input_width()) {
        throw ConfigError("evaluate: encoded width does not match the model");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int predicted = model.forward(data.row(i)) >= 0.5 ? 1 : 0;
        correct += predicted == data.labels[i] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

double evaluate(const MLPModel& model, const data::Dataset& data) {
    return evaluate(model, data::encode_dataset(data, model.spec().representation));
}

SimulationSummary run_simulations(const ModelSpec& spec, const DataGenerator& generator,
                                  const nn::TrainConfig& config, int k, int threads) {
    if (k < 1) throw ConfigError("simulation count must be >= 1");
    std::vector<RunResult> runs(static_cast<std::size_t>(k));
    parallel_for(runs.size(), threads, [&](std::size_t i) {
        nn::TrainConfig run_config = config;
        run_config.seed = config.seed + i;
        try {
            auto split = generator(data_seed(run_config.seed));
            auto [model, result] = train(spec, split.train, run_config);
            result.test_accuracy = evaluate(model, split.test);
            runs[i] = std::move(result);
        } catch (const TrainingDiverged& e) {
            throw TrainingDiverged("simulation " + std::to_string(i) + ": " + e.what());
        } catch (const ConfigError& e) {
            throw ConfigError("simulation " + std::to_string(i) + ": " + e.what());
        }
    });

    SimulationSummary summary;
    for (const auto& r : runs) {
        summary.accuracies.push_back(r.test_accuracy);
        summary.train_accuracies.push_back(r.train_accuracy);
    }
    const auto s = stats::summarize(summary.accuracies);
    summary.mean = s.mean;
    summary.sd = s.sd_pp;
    return summary;
}

} // namespace relbias::train
