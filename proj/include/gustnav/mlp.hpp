#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gustnav/rng.hpp"
#include "gustnav/tensor.hpp"

namespace gustnav {

// Dense feed-forward net: leaky-ReLU hidden layers, linear output.
struct MlpSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_dims;
    std::size_t output_dim = 0;
    double leaky_slope = 0.01;

    std::size_t layer_count() const { return hidden_dims.size() + 1; }
    std::size_t layer_in(std::size_t l) const { return l == 0 ? input_dim : hidden_dims[l - 1]; }
    std::size_t layer_out(std::size_t l) const {
        return l == hidden_dims.size() ? output_dim : hidden_dims[l];
    }
};

// One weight matrix (out x in) and one bias (out) per layer. Doubles as the
// gradient container since gradients are parameter-shaped.
struct ParamSet {
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;

    std::size_t tensor_count() const { return weights.size() + biases.size(); }
    void fill_zero();
    void add_scaled(const ParamSet& other, double scale);
};

// Seeded init, uniform in +-1/sqrt(fan_in) per layer.
ParamSet init_params(const MlpSpec& spec, Rng& rng);
ParamSet zero_params(const MlpSpec& spec);

// Per-layer inputs and pre-activations from a forward pass, consumed by the
// backward pass.
struct MlpCache {
    std::vector<std::vector<double>> act;  // act[l] = input to layer l; act[L] = output
    std::vector<std::vector<double>> pre;  // pre[l] = W*act[l] + b before nonlinearity
};

std::vector<double> mlp_forward(const MlpSpec& spec, const ParamSet& params,
                                std::span<const double> input);

std::vector<double> mlp_forward_cached(const MlpSpec& spec, const ParamSet& params,
                                       std::span<const double> input, MlpCache& cache);

// Accumulates d(upstream . output)/dparam into grad (which must be
// parameter-shaped and zero-initialized by the caller if accumulation is not
// wanted) and returns the gradient with respect to the input.
std::vector<double> mlp_backward(const MlpSpec& spec, const ParamSet& params, const MlpCache& cache,
                                 std::span<const double> upstream, ParamSet& grad);

// Input gradient only, skipping the weight-gradient accumulation.
std::vector<double> mlp_input_gradient(const MlpSpec& spec, const ParamSet& params,
                                       const MlpCache& cache, std::span<const double> upstream);

// Convenience wrapper computing gradients from a fresh forward pass.
std::vector<double> mlp_gradients(const MlpSpec& spec, const ParamSet& params,
                                  std::span<const double> input, std::span<const double> upstream,
                                  ParamSet& grad);

}  // namespace gustnav
