#include "relbias/nn.hpp"

#include "relbias/error.hpp"
#include "relbias/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace relbias::nn {

Gradients zeros_like(std::span<const LayerParams> layers) {
    Gradients out;
    out.reserve(layers.size());
    for (const auto& layer : layers) {
        out.emplace_back(layer.out_dim(), layer.in_dim());
    }
    return out;
}

std::string_view to_string(ActivationKind kind) {
    switch (kind) {
    case ActivationKind::relu: return "relu";
    case ActivationKind::sigmoid: return "sigmoid";
    case ActivationKind::tanh: return "tanh";
    }
    return "?";
}

ActivationKind parse_activation(std::string_view name) {
    if (name == "relu") return ActivationKind::relu;
    if (name == "sigmoid") return ActivationKind::sigmoid;
    if (name == "tanh") return ActivationKind::tanh;
    throw UsageError("unknown activation '" + std::string(name) + "' (expected relu, sigmoid or tanh)");
}

double sigmoid(double x) {
    // Split on sign so exp never overflows.
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double activate(ActivationKind kind, double x) {
    switch (kind) {
    case ActivationKind::relu: return x > 0.0 ? x : 0.0;
    case ActivationKind::sigmoid: return sigmoid(x);
    case ActivationKind::tanh: return std::tanh(x);
    }
    return x;
}

double activation_derivative(ActivationKind kind, double x, double y) {
    switch (kind) {
    case ActivationKind::relu: return x > 0.0 ? 1.0 : 0.0;
    case ActivationKind::sigmoid: return y * (1.0 - y);
    case ActivationKind::tanh: return 1.0 - y * y;
    }
    return 1.0;
}

RealVector apply_activation(ActivationKind kind, std::span<const double> x) {
    RealVector out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [kind](double v) { return activate(kind, v); });
    return out;
}

RealVector dense_forward(const LayerParams& params, std::span<const double> input) {
    if (input.size() != params.in_dim()) {
        throw ConfigError("dense_forward: input length " + std::to_string(input.size()) + " does not match layer fan-in " +
                          std::to_string(params.in_dim()));
    }
    RealVector out(params.bias);
    for (std::size_t r = 0; r < params.out_dim(); ++r) {
        const double* w = params.weights.data.data() + r * params.in_dim();
        double acc = 0.0;
        for (std::size_t c = 0; c < input.size(); ++c) {
            acc += w[c] * input[c];
        }
        out[r] += acc;
    }
    return out;
}

double bce_loss(double prediction, int label) {
    const double p = std::clamp(prediction, kProbabilityClamp, 1.0 - kProbabilityClamp);
    return label != 0 ? -std::log(p) : -std::log(1.0 - p);
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be a finite non-negative number");
    }
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

namespace {

void adam_update(std::span<double> param, std::span<const double> grad, std::span<double> m, std::span<double> v,
                 double lr, double correction1, double correction2, const AdamHyper& h) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g;
        v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g * g;
        const double m_hat = m[i] / correction1;
        const double v_hat = v[i] / correction2;
        param[i] -= lr * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
}

} // namespace

void optimizer_step(OptimizerState& state, std::span<LayerParams> params, std::span<const LayerParams> gradients,
                    double learning_rate, const AdamHyper& hyper) {
    if (params.size() != gradients.size() || state.first_moment.size() != params.size()) {
        throw ConfigError("optimizer_step: parameter, gradient and state layer counts differ");
    }
    state.step_count += 1;
    const auto t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(hyper.beta1, t);
    const double correction2 = 1.0 - std::pow(hyper.beta2, t);
    for (std::size_t l = 0; l < params.size(); ++l) {
        auto& p = params[l];
        const auto& g = gradients[l];
        auto& m = state.first_moment[l];
        auto& v = state.second_moment[l];
        if (g.weights.data.size() != p.weights.data.size() || g.bias.size() != p.bias.size()) {
            throw ConfigError("optimizer_step: gradient shape differs from parameter shape");
        }
        adam_update(p.weights.data, g.weights.data, m.weights.data, v.weights.data, learning_rate, correction1,
                    correction2, hyper);
        adam_update(p.bias, g.bias, m.bias, v.bias, learning_rate, correction1, correction2, hyper);
    }
}

std::vector<LayerParams> init_params(std::span<const LayerShape> shapes, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LayerParams> layers;
    layers.reserve(shapes.size());
    for (const auto& shape : shapes) {
        LayerParams layer(shape.out_dim, shape.in_dim);
        const double limit = std::sqrt(6.0 / static_cast<double>(shape.in_dim + shape.out_dim));
        for (auto& w : layer.weights.data) {
            w = (2.0 * uniform01(rng) - 1.0) * limit;
        }
        layers.push_back(std::move(layer));
    }
    return layers;
}

} // namespace relbias::nn
