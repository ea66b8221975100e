#include "gustnav/adam.hpp"

#include <cmath>

#include "gustnav/errors.hpp"

namespace gustnav {

AdamState AdamState::make(const MlpSpec& spec, double lr_) {
    AdamState st;
    st.first_moment = zero_params(spec);
    st.second_moment = zero_params(spec);
    st.lr = lr_;
    return st;
}

namespace {

void update_tensor(Tensor& p, const Tensor& g, Tensor& m, Tensor& v, const AdamState& st,
                   double bc1, double bc2, const std::string& name) {
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        const double gi = g.data[i];
        if (!std::isfinite(gi))
            throw NumericError("adam_step: non-finite gradient in " + name + "[" +
                               std::to_string(i) + "]");
        m.data[i] = st.beta1 * m.data[i] + (1.0 - st.beta1) * gi;
        v.data[i] = st.beta2 * v.data[i] + (1.0 - st.beta2) * gi * gi;
        const double mhat = m.data[i] / bc1;
        const double vhat = v.data[i] / bc2;
        p.data[i] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
    }
}

}  // namespace

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& adam,
               const std::string& param_name) {
    if (params.weights.size() != grads.weights.size())
        throw ShapeError("adam_step: gradient layer count mismatch for " + param_name);
    adam.step_count += 1;
    const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step_count));
    const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step_count));
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        require_same_shape(params.weights[l], grads.weights[l], "adam_step " + param_name);
        update_tensor(params.weights[l], grads.weights[l], adam.first_moment.weights[l],
                      adam.second_moment.weights[l], adam, bc1, bc2,
                      param_name + ".w" + std::to_string(l));
        update_tensor(params.biases[l], grads.biases[l], adam.first_moment.biases[l],
                      adam.second_moment.biases[l], adam, bc1, bc2,
                      param_name + ".b" + std::to_string(l));
    }
}

}  // namespace gustnav
