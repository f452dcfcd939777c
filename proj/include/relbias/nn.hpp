#pragma once

// Dense-network numerical core: activations, affine layers, binary
// cross-entropy, Adam, Glorot initialization.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace relbias::nn {

using RealVector = std::vector<double>;

/// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool operator==(const Matrix&) const = default;
};

/// One affine layer: weights are out_dim x in_dim.
struct LayerParams {
    Matrix weights;
    RealVector bias;

    LayerParams() = default;
    LayerParams(std::size_t out_dim, std::size_t in_dim) : weights(out_dim, in_dim), bias(out_dim, 0.0) {}

    std::size_t in_dim() const { return weights.cols; }
    std::size_t out_dim() const { return weights.rows; }
    std::size_t parameter_count() const { return weights.data.size() + bias.size(); }

    bool operator==(const LayerParams&) const = default;
};

/// Gradients share the parameter layout.
using Gradients = std::vector<LayerParams>;

/// Zero-filled gradient buffers shaped like `layers`.
Gradients zeros_like(std::span<const LayerParams> layers);

enum class ActivationKind { relu, sigmoid, tanh };

std::string_view to_string(ActivationKind kind);
/// Throws UsageError for unknown names.
ActivationKind parse_activation(std::string_view name);

double sigmoid(double x);
double activate(ActivationKind kind, double x);
/// Derivative expressed through the activation output y = f(x) and input x.
double activation_derivative(ActivationKind kind, double x, double y);

RealVector apply_activation(ActivationKind kind, std::span<const double> x);

/// weights * input + bias. Throws ConfigError on dimension mismatch.
RealVector dense_forward(const LayerParams& params, std::span<const double> input);

inline constexpr double kProbabilityClamp = 1e-7;

/// Binary cross-entropy of one prediction, with p clamped to [eps, 1 - eps].
double bce_loss(double prediction, int label);

struct TrainConfig {
    int epochs = 20;
    double learning_rate = 0.001;
    int batch_size = 16;
    std::uint64_t seed = 0;

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

struct OptimizerState {
    Gradients first_moment;
    Gradients second_moment;
    std::uint64_t step_count = 0;

    OptimizerState() = default;
    explicit OptimizerState(std::span<const LayerParams> layers)
        : first_moment(zeros_like(layers)), second_moment(zeros_like(layers)) {}
};

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One bias-corrected Adam update of `params` in place.
void optimizer_step(OptimizerState& state, std::span<LayerParams> params, std::span<const LayerParams> gradients,
                    double learning_rate, const AdamHyper& hyper = {});

struct LayerShape {
    std::size_t out_dim;
    std::size_t in_dim;
};

/// Glorot-uniform weights, zero biases, deterministic in `seed`.
std::vector<LayerParams> init_params(std::span<const LayerShape> shapes, std::uint64_t seed);

} // namespace relbias::nn
