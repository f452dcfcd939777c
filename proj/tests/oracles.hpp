#pragma once
// Reference implementations used only by the tests. They are written
// independently of the library code they check: brute force where the
// library is clever, finite differences where it is analytic.

#include "relbias/datagen.hpp"
#include "relbias/fusion.hpp"
#include "relbias/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace oracle {

/// Central-difference step and pass threshold for gradient checks.
inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kGradientTolerance = 1e-4;
/// Floor of the relative-error denominator, so that two near-zero
/// gradients do not blow up the ratio.
inline constexpr double kGradientFloor = 1e-6;

/// Largest relative difference between backward() and central finite
/// differences of loss(), over every trainable parameter.
inline double max_gradient_rel_error(relbias::MLPModel& model, std::span<const relbias::Example> batch) {
    relbias::nn::Gradients analytic;
    model.backward(batch, analytic);
    double worst = 0.0;
    auto layers = model.mutable_layers();
    auto check = [&](double& param, double grad) {
        const double saved = param;
        param = saved + kFiniteDifferenceStep;
        const double up = model.loss(batch);
        param = saved - kFiniteDifferenceStep;
        const double down = model.loss(batch);
        param = saved;
        const double numeric = (up - down) / (2.0 * kFiniteDifferenceStep);
        const double denom = std::max({std::abs(grad), std::abs(numeric), kGradientFloor});
        worst = std::max(worst, std::abs(grad - numeric) / denom);
    };
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t i = 0; i < layers[l].weights.data.size(); ++i) {
            check(layers[l].weights.data[i], analytic[l].weights.data[i]);
        }
        for (std::size_t i = 0; i < layers[l].bias.size(); ++i) check(layers[l].bias[i], analytic[l].bias[i]);
    }
    return worst;
}

/// A small random network plus a batch of encoded random pairs.
struct GradientCase {
    relbias::ModelSpec spec;
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;
};

inline GradientCase random_gradient_case(std::uint64_t seed) {
    relbias::Rng rng(seed);
    GradientCase c;
    c.spec.vector_dim = 1 + static_cast<int>(relbias::uniform_below(rng, 4));
    c.spec.hidden_sizes.clear();
    const auto depth = 1 + relbias::uniform_below(rng, 3);
    for (std::uint64_t i = 0; i < depth; ++i) c.spec.hidden_sizes.push_back(1 + static_cast<int>(relbias::uniform_below(rng, 5)));
    c.spec.activation = static_cast<relbias::nn::ActivationKind>(seed % 3);
    c.spec.fusion = static_cast<relbias::FusionMode>((seed / 3) % 3);
    c.spec.representation = relbias::uniform_below(rng, 2) ? relbias::data::Representation::sign
                                                           : relbias::data::Representation::zero_one;
    const auto batch = 1 + relbias::uniform_below(rng, 6);
    for (std::uint64_t i = 0; i < batch; ++i) {
        relbias::data::VectorPair pair{relbias::data::random_bits(c.spec.vector_dim, rng),
                                       relbias::data::random_bits(c.spec.vector_dim, rng)};
        c.inputs.push_back(relbias::data::encode(pair, c.spec.representation));
        c.labels.push_back(static_cast<int>(relbias::uniform_below(rng, 2)));
    }
    return c;
}

/// Model for a gradient case. Biases are drawn away from zero: with the
/// default zero biases an all-zero input puts every relu exactly on its
/// kink, where a central difference measures half the slope.
inline relbias::MLPModel gradient_model(const GradientCase& c, std::uint64_t seed) {
    auto model = relbias::build_model(c.spec, seed);
    relbias::Rng rng(relbias::mix_seed(seed, 0xb1a5));
    for (auto& layer : model.mutable_layers()) {
        for (auto& b : layer.bias) b = (relbias::uniform_below(rng, 2) ? 1.0 : -1.0) * (0.05 + 0.5 * relbias::uniform01(rng));
    }
    return model;
}

inline std::vector<relbias::Example> as_batch(const GradientCase& c) {
    std::vector<relbias::Example> batch;
    for (std::size_t i = 0; i < c.inputs.size(); ++i) batch.push_back({c.inputs[i], c.labels[i]});
    return batch;
}

/// Two-sided exact signed-rank p-value by enumerating all 2^m sign
/// assignments of the nonzero |differences| (m <= 20).
inline double brute_force_wilcoxon_p(std::span<const double> differences) {
    std::vector<double> mags;
    std::vector<bool> positive;
    for (double d : differences) {
        if (d == 0.0) continue;
        mags.push_back(std::abs(d));
        positive.push_back(d > 0.0);
    }
    const std::size_t m = mags.size();
    if (m == 0) return 1.0;
    std::vector<double> ranks(m);
    for (std::size_t i = 0; i < m; ++i) {
        double below = 0.0;
        double equal = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (mags[j] < mags[i]) below += 1.0;
            if (mags[j] == mags[i]) equal += 1.0;
        }
        ranks[i] = below + (equal + 1.0) / 2.0;
    }
    double observed = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (positive[i]) observed += ranks[i];
    }
    const std::uint64_t total = std::uint64_t{1} << m;
    std::uint64_t at_most = 0;
    std::uint64_t at_least = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask >> i & 1U) w += ranks[i];
        }
        // Rank sums are multiples of 0.5, so this tolerance only absorbs rounding.
        if (w <= observed + 1e-9) ++at_most;
        if (w >= observed - 1e-9) ++at_least;
    }
    const double tail = static_cast<double>(std::min(at_most, at_least)) / static_cast<double>(total);
    return std::min(1.0, 2.0 * tail);
}

} // namespace oracle
