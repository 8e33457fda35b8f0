#include "phishdqn/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "phishdqn/errors.hpp"
#include "phishdqn/rng.hpp"

namespace phishdqn {

namespace {

std::vector<std::size_t> layer_dims(const NetworkSpec& spec) {
    std::vector<std::size_t> dims;
    dims.reserve(spec.hidden_dims.size() + 2);
    dims.push_back(spec.input_dim);
    dims.insert(dims.end(), spec.hidden_dims.begin(), spec.hidden_dims.end());
    dims.push_back(spec.output_dim);
    return dims;
}

void check_spec(const NetworkSpec& spec) {
    if (spec.input_dim == 0 || spec.output_dim != 2) {
        throw CorruptFile("network spec must have nonzero input and a 2-unit output head");
    }
    for (std::size_t d : spec.hidden_dims) {
        if (d == 0) {
            throw CorruptFile("network spec contains an empty hidden layer");
        }
    }
}

// z = W x + b for one layer, weights row-major (out x in).
std::vector<double> affine(const LayerParams& layer, std::span<const double> x) {
    std::vector<double> z(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
        double acc = layer.bias[r];
        const double* row = layer.weights.data() + r * layer.in;
        for (std::size_t c = 0; c < layer.in; ++c) {
            acc += row[c] * x[c];
        }
        z[r] = acc;
    }
    return z;
}

std::array<double, 2> softmax2(const std::vector<double>& z) {
    const double m = std::max(z[0], z[1]);
    const double e0 = std::exp(z[0] - m);
    const double e1 = std::exp(z[1] - m);
    const double sum = e0 + e1;
    return {e0 / sum, e1 / sum};
}

LayerParams zero_layer(std::size_t in, std::size_t out) {
    return LayerParams{in, out, std::vector<double>(in * out, 0.0), std::vector<double>(out, 0.0)};
}

}  // namespace

NetworkParams init_network(const NetworkSpec& spec, std::uint64_t seed) {
    check_spec(spec);
    SplitMix64 rng(seed);
    const auto dims = layer_dims(spec);
    NetworkParams params;
    params.spec = spec;
    params.layers.reserve(dims.size() - 1);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const std::size_t fan_in = dims[i];
        const std::size_t fan_out = dims[i + 1];
        LayerParams layer = zero_layer(fan_in, fan_out);
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& w : layer.weights) {
            w = (rng.next_double() * 2.0 - 1.0) * limit;
        }
        params.layers.push_back(std::move(layer));
    }
    return params;
}

std::vector<double> to_input(const FeatureVector& features) {
    std::vector<double> x(kFeatureCount);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        x[i] = static_cast<double>(features.values[i]);
    }
    return x;
}

std::array<double, 2> forward(const NetworkParams& params, std::span<const double> input,
                              ForwardTrace* trace) {
    if (input.size() != params.spec.input_dim) {
        throw LengthMismatch("network input has " + std::to_string(input.size()) +
                             " values, spec expects " + std::to_string(params.spec.input_dim));
    }
    if (trace != nullptr) {
        trace->inputs.clear();
        trace->pre_activations.clear();
    }
    std::vector<double> x(input.begin(), input.end());
    const std::size_t last = params.layers.size() - 1;
    std::vector<double> z;
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        if (trace != nullptr) {
            trace->inputs.push_back(x);
        }
        z = affine(params.layers[i], x);
        if (trace != nullptr) {
            trace->pre_activations.push_back(z);
        }
        if (i < last) {
            x = z;
            for (double& v : x) {
                v = std::max(v, 0.0);
            }
        }
    }
    const auto q = softmax2(z);
    if (trace != nullptr) {
        trace->output = q;
    }
    return q;
}

std::array<double, 2> forward(const NetworkParams& params, const FeatureVector& input,
                              ForwardTrace* trace) {
    const auto x = to_input(input);
    return forward(params, std::span<const double>(x), trace);
}

Gradients backward(const NetworkParams& params, const ForwardTrace& trace, int action,
                   double td_target) {
    if (action != 0 && action != 1) {
        throw LengthMismatch("action index must be 0 or 1");
    }
    if (trace.inputs.size() != params.layers.size()) {
        throw LengthMismatch("forward trace does not match the network depth");
    }
    Gradients grads = zero_gradients(params.spec);

    // Squared TD error on the chosen action's Q-value. With q = softmax(z),
    // dq_a/dz_j = q_a (delta_aj - q_j), so both logits receive gradient.
    const auto& q = trace.output;
    const double resid = td_target - q[static_cast<std::size_t>(action)];
    const double dq = -2.0 * resid;
    std::vector<double> delta(2);
    for (std::size_t j = 0; j < 2; ++j) {
        const double kron = (static_cast<std::size_t>(action) == j) ? 1.0 : 0.0;
        delta[j] = dq * q[static_cast<std::size_t>(action)] * (kron - q[j]);
    }

    for (std::size_t li = params.layers.size(); li-- > 0;) {
        const LayerParams& layer = params.layers[li];
        LayerParams& g = grads.layers[li];
        const std::vector<double>& x = trace.inputs[li];
        for (std::size_t r = 0; r < layer.out; ++r) {
            g.bias[r] = delta[r];
            double* grow = g.weights.data() + r * layer.in;
            for (std::size_t c = 0; c < layer.in; ++c) {
                grow[c] = delta[r] * x[c];
            }
        }
        if (li == 0) {
            break;
        }
        std::vector<double> prev_delta(layer.in, 0.0);
        for (std::size_t r = 0; r < layer.out; ++r) {
            const double* row = layer.weights.data() + r * layer.in;
            for (std::size_t c = 0; c < layer.in; ++c) {
                prev_delta[c] += row[c] * delta[r];
            }
        }
        // ReLU gate of the previous layer: gradient flows only where the
        // pre-activation was positive.
        const std::vector<double>& prev_z = trace.pre_activations[li - 1];
        for (std::size_t c = 0; c < layer.in; ++c) {
            if (prev_z[c] <= 0.0) {
                prev_delta[c] = 0.0;
            }
        }
        delta = std::move(prev_delta);
    }
    return grads;
}

Gradients zero_gradients(const NetworkSpec& spec) {
    const auto dims = layer_dims(spec);
    Gradients grads;
    grads.layers.reserve(dims.size() - 1);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        grads.layers.push_back(zero_layer(dims[i], dims[i + 1]));
    }
    return grads;
}

void accumulate(Gradients& total, const Gradients& addend) {
    if (total.layers.size() != addend.layers.size()) {
        throw LengthMismatch("gradient accumulation across different network shapes");
    }
    for (std::size_t li = 0; li < total.layers.size(); ++li) {
        LayerParams& t = total.layers[li];
        const LayerParams& a = addend.layers[li];
        if (t.weights.size() != a.weights.size() || t.bias.size() != a.bias.size()) {
            throw LengthMismatch("gradient accumulation across different layer shapes");
        }
        for (std::size_t i = 0; i < t.weights.size(); ++i) {
            t.weights[i] += a.weights[i];
        }
        for (std::size_t i = 0; i < t.bias.size(); ++i) {
            t.bias[i] += a.bias[i];
        }
    }
}

AdamState make_adam_state(const NetworkSpec& spec) {
    const auto dims = layer_dims(spec);
    AdamState state;
    state.first_moment.reserve(dims.size() - 1);
    state.second_moment.reserve(dims.size() - 1);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        state.first_moment.push_back(zero_layer(dims[i], dims[i + 1]));
        state.second_moment.push_back(zero_layer(dims[i], dims[i + 1]));
    }
    return state;
}

namespace {

void adam_update_span(std::span<double> theta, std::span<const double> grad_sum,
                      std::span<double> m, std::span<double> v, const AdamState& s,
                      double inv_batch, double bc1, double bc2) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = grad_sum[i] * inv_batch;
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g;
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g * g;
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        theta[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.epsilon_stab);
    }
}

}  // namespace

void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state,
               std::size_t batch_size) {
    if (batch_size == 0) {
        throw LengthMismatch("adam step with batch size zero");
    }
    if (grads.layers.size() != params.layers.size() ||
        state.first_moment.size() != params.layers.size()) {
        throw LengthMismatch("adam step across different network shapes");
    }
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    const double inv_batch = 1.0 / static_cast<double>(batch_size);
    for (std::size_t li = 0; li < params.layers.size(); ++li) {
        LayerParams& p = params.layers[li];
        const LayerParams& g = grads.layers[li];
        LayerParams& m = state.first_moment[li];
        LayerParams& v = state.second_moment[li];
        adam_update_span(p.weights, g.weights, m.weights, v.weights, state, inv_batch, bc1, bc2);
        adam_update_span(p.bias, g.bias, m.bias, v.bias, state, inv_batch, bc1, bc2);
    }
}

namespace {

constexpr const char* kModelMagic = "phishdqn-model";

nlohmann::json layer_to_json(const LayerParams& layer) {
    return nlohmann::json{{"in", layer.in},
                          {"out", layer.out},
                          {"weights", layer.weights},
                          {"bias", layer.bias}};
}

LayerParams layer_from_json(const nlohmann::json& j) {
    LayerParams layer;
    layer.in = j.at("in").get<std::size_t>();
    layer.out = j.at("out").get<std::size_t>();
    layer.weights = j.at("weights").get<std::vector<double>>();
    layer.bias = j.at("bias").get<std::vector<double>>();
    if (layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
        throw CorruptFile("model layer arrays do not match the declared shape");
    }
    return layer;
}

std::vector<nlohmann::json> layers_to_json(const std::vector<LayerParams>& layers) {
    std::vector<nlohmann::json> out;
    out.reserve(layers.size());
    for (const auto& layer : layers) {
        out.push_back(layer_to_json(layer));
    }
    return out;
}

std::vector<LayerParams> layers_from_json(const nlohmann::json& j) {
    if (!j.is_array()) {
        throw CorruptFile("model layer list is not an array");
    }
    std::vector<LayerParams> out;
    out.reserve(j.size());
    for (const auto& item : j) {
        out.push_back(layer_from_json(item));
    }
    return out;
}

void check_chain(const NetworkSpec& spec, const std::vector<LayerParams>& layers,
                 const char* what) {
    const auto dims = layer_dims(spec);
    if (layers.size() != dims.size() - 1) {
        throw CorruptFile(std::string(what) + " layer count does not match the spec");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].in != dims[i] || layers[i].out != dims[i + 1]) {
            throw CorruptFile(std::string(what) + " layer shapes do not chain with the spec");
        }
    }
}

}  // namespace

void save_params(const NetworkParams& params, const std::filesystem::path& path,
                 const AdamState* adam, const nlohmann::json* training_meta) {
    nlohmann::json j;
    j["magic"] = kModelMagic;
    j["format_version"] = kModelFormatVersion;
    j["feature_order"] = kFeatureNames;
    j["spec"] = {{"input_dim", params.spec.input_dim},
                 {"hidden_dims", params.spec.hidden_dims},
                 {"output_dim", params.spec.output_dim}};
    j["layers"] = layers_to_json(params.layers);
    if (adam != nullptr) {
        j["adam"] = {{"first_moment", layers_to_json(adam->first_moment)},
                     {"second_moment", layers_to_json(adam->second_moment)},
                     {"step_count", adam->step_count},
                     {"learning_rate", adam->learning_rate},
                     {"beta1", adam->beta1},
                     {"beta2", adam->beta2},
                     {"epsilon_stab", adam->epsilon_stab}};
    }
    if (training_meta != nullptr && !training_meta->is_null()) {
        j["training_meta"] = *training_meta;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open model file for writing: " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("failed while writing model file: " + path.string());
    }
}

LoadedModel load_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open model file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFile("model file is not valid JSON: " + std::string(e.what()));
    }
    try {
        if (!j.is_object() || !j.contains("magic") || !j.at("magic").is_string() ||
            j.at("magic").get<std::string>() != kModelMagic) {
            throw CorruptFile("model file lacks the expected magic marker");
        }
        if (!j.contains("format_version") || !j.at("format_version").is_number_integer()) {
            throw CorruptFile("model file lacks a format version");
        }
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw VersionMismatch("model format version " + std::to_string(version) +
                                  " is not supported (this build reads version " +
                                  std::to_string(kModelFormatVersion) + ")");
        }
        const auto order = j.at("feature_order").get<std::vector<std::string>>();
        if (order.size() != kFeatureNames.size() ||
            !std::equal(order.begin(), order.end(), kFeatureNames.begin())) {
            throw VersionMismatch("model feature order does not match this build");
        }

        LoadedModel loaded;
        const auto& spec_j = j.at("spec");
        loaded.params.spec.input_dim = spec_j.at("input_dim").get<std::size_t>();
        loaded.params.spec.hidden_dims = spec_j.at("hidden_dims").get<std::vector<std::size_t>>();
        loaded.params.spec.output_dim = spec_j.at("output_dim").get<std::size_t>();
        check_spec(loaded.params.spec);
        if (loaded.params.spec.input_dim != kFeatureCount) {
            throw VersionMismatch("model input width does not match the feature count");
        }
        loaded.params.layers = layers_from_json(j.at("layers"));
        check_chain(loaded.params.spec, loaded.params.layers, "model");

        if (j.contains("adam")) {
            const auto& a = j.at("adam");
            AdamState state;
            state.first_moment = layers_from_json(a.at("first_moment"));
            state.second_moment = layers_from_json(a.at("second_moment"));
            check_chain(loaded.params.spec, state.first_moment, "optimizer first-moment");
            check_chain(loaded.params.spec, state.second_moment, "optimizer second-moment");
            state.step_count = a.at("step_count").get<std::uint64_t>();
            state.learning_rate = a.at("learning_rate").get<double>();
            state.beta1 = a.at("beta1").get<double>();
            state.beta2 = a.at("beta2").get<double>();
            state.epsilon_stab = a.at("epsilon_stab").get<double>();
            loaded.adam = std::move(state);
        }
        if (j.contains("training_meta")) {
            loaded.training_meta = j.at("training_meta");
        }
        return loaded;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFile("model file is structurally invalid: " + std::string(e.what()));
    }
}

}  // namespace phishdqn
