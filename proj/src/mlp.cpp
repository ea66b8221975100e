#include "gustnav/mlp.hpp"

#include <cmath>
#include <cstring>

#include "gustnav/errors.hpp"

namespace gustnav {

namespace {

// y = W x + b with four independent accumulators per row so the compiler can
// vectorize the reduction without reassociating under -ffast-math (which
// would break NaN tripwires elsewhere).
void matvec(const Tensor& w, const Tensor& b, const double* x, double* y) {
    const std::size_t rows = w.shape[0];
    const std::size_t cols = w.shape[1];
    const double* wd = w.data.data();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = wd + r * cols;
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        std::size_t j = 0;
        for (; j + 4 <= cols; j += 4) {
            s0 += row[j] * x[j];
            s1 += row[j + 1] * x[j + 1];
            s2 += row[j + 2] * x[j + 2];
            s3 += row[j + 3] * x[j + 3];
        }
        for (; j < cols; ++j) s0 += row[j] * x[j];
        y[r] = (s0 + s1) + (s2 + s3) + b.data[r];
    }
}

}  // namespace

void ParamSet::fill_zero() {
    for (auto& t : weights) std::memset(t.data.data(), 0, t.data.size() * sizeof(double));
    for (auto& t : biases) std::memset(t.data.data(), 0, t.data.size() * sizeof(double));
}

void ParamSet::add_scaled(const ParamSet& other, double scale) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t i = 0; i < weights[l].data.size(); ++i)
            weights[l].data[i] += scale * other.weights[l].data[i];
        for (std::size_t i = 0; i < biases[l].data.size(); ++i)
            biases[l].data[i] += scale * other.biases[l].data[i];
    }
}

ParamSet init_params(const MlpSpec& spec, Rng& rng) {
    ParamSet p;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        const std::size_t in = spec.layer_in(l);
        const std::size_t out = spec.layer_out(l);
        Tensor w = Tensor::zeros({out, in});
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (auto& v : w.data) v = rng.uniform(-bound, bound);
        Tensor b = Tensor::zeros({out});
        for (auto& v : b.data) v = rng.uniform(-bound, bound);
        p.weights.push_back(std::move(w));
        p.biases.push_back(std::move(b));
    }
    return p;
}

ParamSet zero_params(const MlpSpec& spec) {
    ParamSet p;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        p.weights.push_back(Tensor::zeros({spec.layer_out(l), spec.layer_in(l)}));
        p.biases.push_back(Tensor::zeros({spec.layer_out(l)}));
    }
    return p;
}

std::vector<double> mlp_forward_cached(const MlpSpec& spec, const ParamSet& params,
                                       std::span<const double> input, MlpCache& cache) {
    if (input.size() != spec.input_dim)
        throw ShapeError("mlp_forward: input length " + std::to_string(input.size()) +
                         " != input_dim " + std::to_string(spec.input_dim));
    if (params.weights.size() != spec.layer_count())
        throw ShapeError("mlp_forward: parameter set does not match spec layer count");

    const std::size_t layers = spec.layer_count();
    cache.act.resize(layers + 1);
    cache.pre.resize(layers);
    cache.act[0].assign(input.begin(), input.end());

    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t out = spec.layer_out(l);
        if (params.weights[l].shape[0] != out || params.weights[l].shape[1] != spec.layer_in(l))
            throw ShapeError("mlp_forward: weight shape mismatch at layer " + std::to_string(l));
        cache.pre[l].resize(out);
        matvec(params.weights[l], params.biases[l], cache.act[l].data(), cache.pre[l].data());
        cache.act[l + 1].resize(out);
        if (l + 1 == layers) {
            cache.act[l + 1] = cache.pre[l];  // linear output layer
        } else {
            const double slope = spec.leaky_slope;
            for (std::size_t i = 0; i < out; ++i) {
                const double v = cache.pre[l][i];
                cache.act[l + 1][i] = v > 0.0 ? v : slope * v;
            }
        }
    }
    return cache.act[layers];
}

std::vector<double> mlp_forward(const MlpSpec& spec, const ParamSet& params,
                                std::span<const double> input) {
    MlpCache cache;
    return mlp_forward_cached(spec, params, input, cache);
}

namespace {

std::vector<double> backward_impl(const MlpSpec& spec, const ParamSet& params,
                                  const MlpCache& cache, std::span<const double> upstream,
                                  ParamSet* grad) {
    if (upstream.size() != spec.output_dim)
        throw ShapeError("mlp_backward: upstream length " + std::to_string(upstream.size()) +
                         " != output_dim " + std::to_string(spec.output_dim));
    const std::size_t layers = spec.layer_count();

    std::vector<double> delta(upstream.begin(), upstream.end());
    std::vector<double> dx;
    for (std::size_t li = layers; li-- > 0;) {
        const std::size_t out = spec.layer_out(li);
        const std::size_t in = spec.layer_in(li);
        if (grad) {
            const std::vector<double>& x = cache.act[li];
            double* gw = grad->weights[li].data.data();
            double* gb = grad->biases[li].data.data();
            for (std::size_t r = 0; r < out; ++r) {
                const double d = delta[r];
                gb[r] += d;
                double* grow = gw + r * in;
                for (std::size_t j = 0; j < in; ++j) grow[j] += d * x[j];
            }
        }
        // dx = W^T delta, accumulated row-wise to keep unit stride.
        dx.assign(in, 0.0);
        const double* wd = params.weights[li].data.data();
        for (std::size_t r = 0; r < out; ++r) {
            const double d = delta[r];
            const double* row = wd + r * in;
            for (std::size_t j = 0; j < in; ++j) dx[j] += row[j] * d;
        }
        if (li > 0) {
            const double slope = spec.leaky_slope;
            const std::vector<double>& pre = cache.pre[li - 1];
            delta.resize(in);
            for (std::size_t j = 0; j < in; ++j)
                delta[j] = pre[j] > 0.0 ? dx[j] : slope * dx[j];
        }
    }
    return dx;
}

}  // namespace

std::vector<double> mlp_backward(const MlpSpec& spec, const ParamSet& params, const MlpCache& cache,
                                 std::span<const double> upstream, ParamSet& grad) {
    return backward_impl(spec, params, cache, upstream, &grad);
}

std::vector<double> mlp_input_gradient(const MlpSpec& spec, const ParamSet& params,
                                       const MlpCache& cache, std::span<const double> upstream) {
    return backward_impl(spec, params, cache, upstream, nullptr);
}

std::vector<double> mlp_gradients(const MlpSpec& spec, const ParamSet& params,
                                  std::span<const double> input, std::span<const double> upstream,
                                  ParamSet& grad) {
    MlpCache cache;
    mlp_forward_cached(spec, params, input, cache);
    return mlp_backward(spec, params, cache, upstream, grad);
}

}  // namespace gustnav
