#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "phishdqn/features.hpp"

namespace phishdqn {

/// Layer sizes of the Q-network. Inputs are fixed-width binary vectors, so
/// no lookup-table embedding exists: the first dense layer maps the raw bits
/// into the hidden representation and plays that role. Hidden layers use
/// ReLU; the two-unit output head is a softmax, so the pair of Q-values
/// always sums to 1 and each lies in [0, 1].
struct NetworkSpec {
    std::size_t input_dim = kFeatureCount;
    std::vector<std::size_t> hidden_dims = {32, 16};
    std::size_t output_dim = 2;

    bool operator==(const NetworkSpec&) const = default;
};

/// One affine layer, weights row-major (out x in).
struct LayerParams {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;
    std::vector<double> bias;
};

struct NetworkParams {
    NetworkSpec spec;
    std::vector<LayerParams> layers;
};

/// Pre-activations and layer inputs kept from a forward pass for backprop.
struct ForwardTrace {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> pre_activations;
    std::array<double, 2> output{};
};

/// Loss gradients shaped like the parameters they belong to.
struct Gradients {
    std::vector<LayerParams> layers;
};

struct AdamState {
    std::vector<LayerParams> first_moment;
    std::vector<LayerParams> second_moment;
    std::uint64_t step_count = 0;
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon_stab = 1e-8;
};

/// Glorot-uniform weights, +-sqrt(6 / (fan_in + fan_out)); zero biases.
/// Deterministic under `seed`.
NetworkParams init_network(const NetworkSpec& spec, std::uint64_t seed);

/// Affine + ReLU through the hidden layers, affine + softmax at the head.
/// The softmax subtracts the max logit before exponentiating. Pass `trace`
/// to retain what backward needs.
std::array<double, 2> forward(const NetworkParams& params, std::span<const double> input,
                              ForwardTrace* trace = nullptr);
std::array<double, 2> forward(const NetworkParams& params, const FeatureVector& input,
                              ForwardTrace* trace = nullptr);

std::vector<double> to_input(const FeatureVector& features);

/// Gradients of (td_target - q[action])^2 for every weight and bias. Only
/// the chosen action's output carries loss, but the softmax couples the
/// gradient into both output units.
Gradients backward(const NetworkParams& params, const ForwardTrace& trace, int action,
                   double td_target);

Gradients zero_gradients(const NetworkSpec& spec);
void accumulate(Gradients& total, const Gradients& addend);

AdamState make_adam_state(const NetworkSpec& spec);

/// Bias-corrected Adam update. `grads` holds gradients summed over the
/// minibatch; they are divided by `batch_size` here so the learning rate is
/// independent of the batch size.
void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state,
               std::size_t batch_size);

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON model file. Doubles round-trip bit-exactly. The file pins
/// the 14 feature names in slot order; loading a file whose order differs
/// from this build is a hard error.
void save_params(const NetworkParams& params, const std::filesystem::path& path,
                 const AdamState* adam = nullptr,
                 const nlohmann::json* training_meta = nullptr);

struct LoadedModel {
    NetworkParams params;
    std::optional<AdamState> adam;
    nlohmann::json training_meta;
};

LoadedModel load_params(const std::filesystem::path& path);

}  // namespace phishdqn
