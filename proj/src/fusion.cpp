#include "relbias/fusion.hpp"

#include "relbias/error.hpp"

#include <cmath>
#include <sstream>

namespace relbias {

std::string_view to_string(FusionMode mode) {
    switch (mode) {
    case FusionMode::plain: return "plain";
    case FusionMode::early: return "early";
    case FusionMode::mid: return "mid";
    }
    return "?";
}

FusionMode parse_fusion(std::string_view name) {
    if (name == "plain") return FusionMode::plain;
    if (name == "early") return FusionMode::early;
    if (name == "mid") return FusionMode::mid;
    throw UsageError("unknown fusion mode '" + std::string(name) + "' (expected plain, early or mid)");
}

nn::RealVector dr_compute(std::span<const double> v1, std::span<const double> v2) {
    if (v1.size() != v2.size()) {
        throw ConfigError("dr_compute: vectors of length " + std::to_string(v1.size()) + " and " +
                          std::to_string(v2.size()));
    }
    nn::RealVector out(v1.size());
    for (std::size_t i = 0; i < v1.size(); ++i) {
        out[i] = std::abs(v1[i] - v2[i]);
    }
    return out;
}

void ModelSpec::validate() const {
    if (vector_dim < 1) throw ConfigError("vector_dim must be >= 1");
    if (hidden_sizes.empty()) throw ConfigError("hidden_sizes must not be empty");
    for (int h : hidden_sizes) {
        if (h < 1) throw ConfigError("hidden layer sizes must be >= 1");
    }
}

std::size_t ModelSpec::first_layer_fan_in() const {
    const auto n = static_cast<std::size_t>(vector_dim);
    return fusion == FusionMode::early ? 3 * n : 2 * n;
}

std::vector<nn::LayerShape> ModelSpec::layer_shapes() const {
    validate();
    std::vector<nn::LayerShape> shapes;
    std::size_t fan_in = first_layer_fan_in();
    for (std::size_t l = 0; l < hidden_sizes.size(); ++l) {
        const auto width = static_cast<std::size_t>(hidden_sizes[l]);
        shapes.push_back({width, fan_in});
        fan_in = width;
        if (l == 0 && fusion == FusionMode::mid) {
            fan_in += static_cast<std::size_t>(vector_dim);
        }
    }
    shapes.push_back({1, fan_in});
    return shapes;
}

std::size_t ModelSpec::trainable_parameter_count() const {
    std::size_t count = 0;
    for (const auto& s : layer_shapes()) {
        count += s.out_dim * s.in_dim + s.out_dim;
    }
    return count;
}

std::string ModelSpec::describe() const {
    std::ostringstream os;
    os << to_string(fusion) << " n=" << vector_dim << " hidden=[";
    for (std::size_t i = 0; i < hidden_sizes.size(); ++i) {
        os << (i ? "," : "") << hidden_sizes[i];
    }
    os << "] " << nn::to_string(activation) << ' ' << data::to_string(representation);
    return os.str();
}

std::vector<nn::LayerParams> init_params(const ModelSpec& spec, std::uint64_t seed) {
    const auto shapes = spec.layer_shapes();
    return nn::init_params(shapes, seed);
}

struct MLPModel::Trace {
    nn::RealVector dr;
    std::vector<nn::RealVector> layer_inputs; // one per trainable layer
    std::vector<nn::RealVector> pre;          // hidden pre-activations
    std::vector<nn::RealVector> post;         // hidden activations
    double probability = 0.5;
};

MLPModel::MLPModel(ModelSpec spec, std::vector<nn::LayerParams> layers)
    : spec_(std::move(spec)), layers_(std::move(layers)) {
    const auto shapes = spec_.layer_shapes();
    if (shapes.size() != layers_.size()) throw ConfigError("MLPModel: layer count does not match spec");
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        if (layers_[l].out_dim() != shapes[l].out_dim || layers_[l].in_dim() != shapes[l].in_dim ||
            layers_[l].bias.size() != shapes[l].out_dim) {
            throw ConfigError("MLPModel: layer " + std::to_string(l) + " shape does not match spec");
        }
    }
}

nn::RealVector MLPModel::dr_features(std::span<const double> input) const {
    const auto n = static_cast<std::size_t>(spec_.vector_dim);
    if (input.size() != 2 * n) {
        throw ConfigError("model expects an encoded pair of width " + std::to_string(2 * n) + ", got " +
                          std::to_string(input.size()));
    }
    return dr_compute(input.first(n), input.subspan(n));
}

void MLPModel::run_forward(std::span<const double> input, Trace& trace) const {
    trace.dr = dr_features(input);
    const std::size_t hidden = layers_.size() - 1;
    trace.layer_inputs.resize(layers_.size());
    trace.pre.resize(hidden);
    trace.post.resize(hidden);

    auto& first = trace.layer_inputs[0];
    first.assign(input.begin(), input.end());
    if (spec_.fusion == FusionMode::early) {
        first.insert(first.end(), trace.dr.begin(), trace.dr.end());
    }
    for (std::size_t l = 0; l < hidden; ++l) {
        trace.pre[l] = nn::dense_forward(layers_[l], trace.layer_inputs[l]);
        trace.post[l] = nn::apply_activation(spec_.activation, trace.pre[l]);
        auto& next = trace.layer_inputs[l + 1];
        next = trace.post[l];
        if (l == 0 && spec_.fusion == FusionMode::mid) {
            next.insert(next.end(), trace.dr.begin(), trace.dr.end());
        }
    }
    const auto logit = nn::dense_forward(layers_.back(), trace.layer_inputs.back());
    trace.probability = nn::sigmoid(logit[0]);
}

double MLPModel::forward(std::span<const double> input) const {
    Trace trace;
    run_forward(input, trace);
    return trace.probability;
}

double MLPModel::forward_pair(const data::VectorPair& pair) const {
    if (pair.v1.size() != static_cast<std::size_t>(spec_.vector_dim) || pair.v2.size() != pair.v1.size()) {
        throw ConfigError("forward_pair: pair dimension does not match model dimension " +
                          std::to_string(spec_.vector_dim));
    }
    return forward(data::encode(pair, spec_.representation));
}

double MLPModel::backward(std::span<const Example> batch, nn::Gradients& grads) const {
    grads = nn::zeros_like(layers_);
    if (batch.empty()) return 0.0;
    const double scale = 1.0 / static_cast<double>(batch.size());
    double total_loss = 0.0;
    Trace trace;
    nn::RealVector delta;
    nn::RealVector upstream;
    for (const auto& example : batch) {
        run_forward(example.input, trace);
        total_loss += nn::bce_loss(trace.probability, example.label);

        // d(BCE)/d(logit) of the unclamped loss.
        delta.assign(1, (trace.probability - (example.label != 0 ? 1.0 : 0.0)) * scale);
        for (std::size_t l = layers_.size(); l-- > 0;) {
            const auto& layer = layers_[l];
            const auto& in = trace.layer_inputs[l];
            auto& g = grads[l];
            for (std::size_t r = 0; r < layer.out_dim(); ++r) {
                const double d = delta[r];
                if (d == 0.0) continue;
                double* gw = g.weights.data.data() + r * layer.in_dim();
                for (std::size_t c = 0; c < in.size(); ++c) {
                    gw[c] += d * in[c];
                }
                g.bias[r] += d;
            }
            if (l == 0) break;
            // Only the trainable part of the previous output receives gradient;
            // the DR channels of a mid-fusion layer input are dropped here.
            const std::size_t prev_width = layers_[l - 1].out_dim();
            upstream.assign(prev_width, 0.0);
            for (std::size_t r = 0; r < layer.out_dim(); ++r) {
                const double d = delta[r];
                if (d == 0.0) continue;
                const double* w = layer.weights.data.data() + r * layer.in_dim();
                for (std::size_t c = 0; c < prev_width; ++c) {
                    upstream[c] += w[c] * d;
                }
            }
            const auto& pre = trace.pre[l - 1];
            const auto& post = trace.post[l - 1];
            delta.resize(prev_width);
            for (std::size_t c = 0; c < prev_width; ++c) {
                delta[c] = upstream[c] * nn::activation_derivative(spec_.activation, pre[c], post[c]);
            }
        }
    }
    return total_loss * scale;
}

double MLPModel::loss(std::span<const Example> batch) const {
    if (batch.empty()) return 0.0;
    double total = 0.0;
    for (const auto& example : batch) {
        total += nn::bce_loss(forward(example.input), example.label);
    }
    return total / static_cast<double>(batch.size());
}

MLPModel build_model(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    return MLPModel(spec, init_params(spec, seed));
}

MLPModel make_dr_readout_model(int n, double dr_weight, double bias, data::Representation repr) {
    ModelSpec spec;
    spec.vector_dim = n;
    spec.hidden_sizes = {10};
    spec.fusion = FusionMode::mid;
    spec.representation = repr;
    auto layers = nn::zeros_like(std::vector<nn::LayerParams>(init_params(spec, 0)));
    auto& readout = layers.back();
    const std::size_t hidden = static_cast<std::size_t>(spec.hidden_sizes[0]);
    for (std::size_t c = hidden; c < readout.in_dim(); ++c) {
        readout.weights(0, c) = dr_weight;
    }
    readout.bias[0] = bias;
    return MLPModel(std::move(spec), std::move(layers));
}

} // namespace relbias
