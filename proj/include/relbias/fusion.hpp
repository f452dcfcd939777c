#pragma once

// Differentiator-rectifier (DR) units and the plain / early-fusion /
// mid-fusion network wiring built around them.
//
// A DR unit compares one dimension of v1 with the same dimension of v2 and
// outputs |x - y|. Its input weights are fixed at 1 and it has no bias or
// activation, so the DR block is pure structure: MLPModel never stores it
// as parameters and gradients never reach it.

#include "relbias/datagen.hpp"
#include "relbias/nn.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relbias {

enum class FusionMode { plain, early, mid };

std::string_view to_string(FusionMode mode);
FusionMode parse_fusion(std::string_view name);

/// Elementwise |v1 - v2|. Throws ConfigError on length mismatch.
nn::RealVector dr_compute(std::span<const double> v1, std::span<const double> v2);

struct ModelSpec {
    int vector_dim = 10;
    std::vector<int> hidden_sizes{10};
    nn::ActivationKind activation = nn::ActivationKind::relu;
    FusionMode fusion = FusionMode::plain;
    data::Representation representation = data::Representation::zero_one;

    /// Throws ConfigError.
    void validate() const;

    /// Width of the encoded pair fed to the network (2n).
    std::size_t input_width() const { return 2 * static_cast<std::size_t>(vector_dim); }
    /// Fan-in of the first trainable layer: 3n for early fusion, else 2n.
    std::size_t first_layer_fan_in() const;
    /// Shapes of the trainable layers, output layer last.
    std::vector<nn::LayerShape> layer_shapes() const;
    std::size_t trainable_parameter_count() const;

    std::string describe() const;
};

/// Glorot-uniform parameters for every trainable layer of `spec`.
std::vector<nn::LayerParams> init_params(const ModelSpec& spec, std::uint64_t seed);

/// One encoded example as seen by backward().
struct Example {
    std::span<const double> input;
    int label = 0;
};

class MLPModel {
public:
    MLPModel(ModelSpec spec, std::vector<nn::LayerParams> layers);

    const ModelSpec& spec() const { return spec_; }
    std::span<const nn::LayerParams> layers() const { return layers_; }
    std::span<nn::LayerParams> mutable_layers() { return layers_; }

    /// DR outputs for an encoded pair [v1, v2].
    nn::RealVector dr_features(std::span<const double> input) const;

    /// Probability of class 1 for an encoded pair.
    double forward(std::span<const double> input) const;
    double forward_pair(const data::VectorPair& pair) const;

    /// Mean clamped BCE over `batch`; writes the gradient of the mean loss
    /// into `grads` (same layout as layers()).
    double backward(std::span<const Example> batch, nn::Gradients& grads) const;

    /// Mean clamped BCE, no gradient.
    double loss(std::span<const Example> batch) const;

private:
    struct Trace;
    void run_forward(std::span<const double> input, Trace& trace) const;

    ModelSpec spec_;
    std::vector<nn::LayerParams> layers_;
};

MLPModel build_model(const ModelSpec& spec, std::uint64_t seed);

/// Mid-fusion model with a hand-set readout: weight `dr_weight` on every
/// DR channel, 0 on hidden channels, bias `bias`. Equal pairs give
/// sigmoid(bias), any unequal 0/1 pair at most sigmoid(bias + dr_weight).
MLPModel make_dr_readout_model(int n, double dr_weight = -10.0, double bias = 5.0,
                               data::Representation repr = data::Representation::zero_one);

} // namespace relbias
