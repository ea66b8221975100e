#include "gustnav/sac.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gustnav/errors.hpp"

namespace gustnav {

SacNetworks SacNetworks::make(std::size_t state_dim, std::size_t action_dim,
                              const std::vector<std::size_t>& hidden_dims, double leaky_slope,
                              Rng& rng) {
    SacNetworks nets;
    nets.policy_spec = {state_dim, hidden_dims, 2 * action_dim, leaky_slope};
    nets.q_spec = {state_dim + action_dim, hidden_dims, 1, leaky_slope};
    nets.v_spec = {state_dim, hidden_dims, 1, leaky_slope};
    nets.policy = init_params(nets.policy_spec, rng);
    nets.q1 = init_params(nets.q_spec, rng);
    nets.q2 = init_params(nets.q_spec, rng);
    nets.v = init_params(nets.v_spec, rng);
    nets.v_target = nets.v;
    return nets;
}

SacGradients SacGradients::zeros(const SacNetworks& nets) {
    return {zero_params(nets.policy_spec), zero_params(nets.q_spec), zero_params(nets.q_spec),
            zero_params(nets.v_spec)};
}

void SacGradients::fill_zero() {
    policy.fill_zero();
    q1.fill_zero();
    q2.fill_zero();
    v.fill_zero();
}

AdamStates AdamStates::make(const SacNetworks& nets, double lr) {
    return {AdamState::make(nets.policy_spec, lr), AdamState::make(nets.q_spec, lr),
            AdamState::make(nets.q_spec, lr), AdamState::make(nets.v_spec, lr)};
}

double q_target(double reward, bool terminal, double v_target_next, double gamma) {
    return terminal ? reward : reward + gamma * v_target_next;
}

double v_target_value(double q1, double q2, double log_prob, double alpha) {
    return std::min(q1, q2) - alpha * log_prob;
}

void polyak_update(const ParamSet& online, ParamSet& target, double tau) {
    if (online.weights.size() != target.weights.size())
        throw ShapeError("polyak_update: layer count mismatch");
    for (std::size_t l = 0; l < online.weights.size(); ++l) {
        require_same_shape(online.weights[l], target.weights[l], "polyak_update");
        for (std::size_t i = 0; i < online.weights[l].data.size(); ++i)
            target.weights[l].data[i] =
                (1.0 - tau) * target.weights[l].data[i] + tau * online.weights[l].data[i];
        for (std::size_t i = 0; i < online.biases[l].data.size(); ++i)
            target.biases[l].data[i] =
                (1.0 - tau) * target.biases[l].data[i] + tau * online.biases[l].data[i];
    }
}

LossReport compute_losses(const SacNetworks& nets, const std::vector<const Transition*>& batch,
                          const ActionBounds& bounds, const SacHyper& hyper,
                          const std::vector<double>& noise, SacGradients& grads) {
    const std::size_t n = batch.size();
    if (n == 0) throw ShapeError("compute_losses: empty batch");
    const std::size_t adim = nets.action_dim();
    const std::size_t sdim = nets.state_dim();
    if (noise.size() != n * adim) throw ShapeError("compute_losses: noise size mismatch");
    if (bounds.dim() != adim) throw ShapeError("compute_losses: bounds dimension mismatch");

    grads.fill_zero();
    LossReport report;
    const double inv_n = 1.0 / static_cast<double>(n);

    MlpCache q1_cache, q2_cache, v_cache, pi_cache, qa1_cache, qa2_cache;
    std::vector<double> sa(sdim + adim);
    const std::vector<double> one{1.0};

    for (std::size_t i = 0; i < n; ++i) {
        const Transition& tr = *batch[i];
        if (tr.state.size() != sdim || tr.action.size() != adim)
            throw ShapeError("compute_losses: transition dimensions do not match networks");

        // --- critic regression toward r + gamma * Vbar(s') ---
        const double vbar_next = mlp_forward(nets.v_spec, nets.v_target, tr.next_state)[0];
        const double y = q_target(tr.reward, tr.terminal, vbar_next, hyper.gamma);

        std::copy(tr.state.begin(), tr.state.end(), sa.begin());
        std::copy(tr.action.begin(), tr.action.end(), sa.begin() + sdim);
        const double q1v = mlp_forward_cached(nets.q_spec, nets.q1, sa, q1_cache)[0];
        const double q2v = mlp_forward_cached(nets.q_spec, nets.q2, sa, q2_cache)[0];
        report.q1_loss += 0.5 * (q1v - y) * (q1v - y) * inv_n;
        report.q2_loss += 0.5 * (q2v - y) * (q2v - y) * inv_n;
        report.mean_q += std::min(q1v, q2v) * inv_n;

        const double up1 = (q1v - y) * inv_n;
        const double up2 = (q2v - y) * inv_n;
        mlp_backward(nets.q_spec, nets.q1, q1_cache, std::span(&up1, 1), grads.q1);
        mlp_backward(nets.q_spec, nets.q2, q2_cache, std::span(&up2, 1), grads.q2);

        // --- fresh action a~ through the squashing head ---
        const std::vector<double> raw =
            mlp_forward_cached(nets.policy_spec, nets.policy, tr.state, pi_cache);
        const PolicyHeadOutput head = split_policy_output(raw);
        const std::span<const double> eps(noise.data() + i * adim, adim);
        const SampleResult sample = squashed_sample(head, bounds, eps);
        report.mean_entropy += -sample.log_prob * inv_n;

        std::copy(tr.state.begin(), tr.state.end(), sa.begin());
        std::copy(sample.action.begin(), sample.action.end(), sa.begin() + sdim);
        const double qa1 = mlp_forward_cached(nets.q_spec, nets.q1, sa, qa1_cache)[0];
        const double qa2 = mlp_forward_cached(nets.q_spec, nets.q2, sa, qa2_cache)[0];
        const bool use_q1 = qa1 <= qa2;
        const double qmin = use_q1 ? qa1 : qa2;

        // --- value regression toward the (stop-gradient) soft target ---
        const double vhat = v_target_value(qa1, qa2, sample.log_prob, hyper.alpha);
        const double vv = mlp_forward_cached(nets.v_spec, nets.v, tr.state, v_cache)[0];
        report.v_loss += 0.5 * (vv - vhat) * (vv - vhat) * inv_n;
        const double upv = (vv - vhat) * inv_n;
        mlp_backward(nets.v_spec, nets.v, v_cache, std::span(&upv, 1), grads.v);

        // --- reparameterized policy objective ---
        report.policy_loss += (hyper.alpha * sample.log_prob - qmin) * inv_n;

        // dL/da~ comes through the chosen critic's input gradient.
        const double up_min = -inv_n;
        const std::vector<double> dsa =
            mlp_input_gradient(nets.q_spec, use_q1 ? nets.q1 : nets.q2,
                               use_q1 ? qa1_cache : qa2_cache, std::span(&up_min, 1));

        std::vector<double> up_policy(2 * adim);
        for (std::size_t j = 0; j < adim; ++j) {
            const double log_std = head.log_std[j];
            const double sigma = std::exp(log_std);
            const double u = head.mean[j] + sigma * eps[j];
            const double t = std::tanh(u);
            const double da = dsa[sdim + j];
            // d log pi / du = 2 tanh(u); d a / du = (1-t^2)(hi-lo)/2
            const double dldu = da * (1.0 - t * t) * 0.5 * (bounds.hi[j] - bounds.lo[j]) +
                                hyper.alpha * inv_n * 2.0 * t;
            up_policy[j] = dldu;
            double dldl = dldu * sigma * eps[j] - hyper.alpha * inv_n;
            // log-std clamp gates its gradient
            const double raw_ls = raw[adim + j];
            if (raw_ls <= kLogStdMin || raw_ls >= kLogStdMax) dldl = 0.0;
            up_policy[adim + j] = dldl;
        }
        mlp_backward(nets.policy_spec, nets.policy, pi_cache, up_policy, grads.policy);
    }

    auto check = [](double v, const char* name) {
        if (!std::isfinite(v)) throw NumericError(std::string("compute_losses: ") + name +
                                                  " is not finite");
    };
    check(report.q1_loss, "q1_loss");
    check(report.q2_loss, "q2_loss");
    check(report.v_loss, "v_loss");
    check(report.policy_loss, "policy_loss");
    return report;
}

LossReport compute_losses(const SacNetworks& nets, const std::vector<const Transition*>& batch,
                          const ActionBounds& bounds, const SacHyper& hyper, Rng& rng,
                          SacGradients& grads) {
    std::vector<double> noise(batch.size() * nets.action_dim());
    for (auto& v : noise) v = rng.normal();
    return compute_losses(nets, batch, bounds, hyper, noise, grads);
}

std::optional<LossReport> train_step(SacNetworks& nets, AdamStates& adam, ReplayBuffer& buffer,
                                     const ActionBounds& bounds, const SacHyper& hyper, Rng& rng) {
    if (buffer.size() < hyper.batch_size) return std::nullopt;
    const std::vector<const Transition*> batch = buffer.sample_cer(hyper.batch_size, rng);
    SacGradients grads = SacGradients::zeros(nets);
    const LossReport report = compute_losses(nets, batch, bounds, hyper, rng, grads);
    adam_step(nets.policy, grads.policy, adam.policy, "policy");
    adam_step(nets.q1, grads.q1, adam.q1, "q1");
    adam_step(nets.q2, grads.q2, adam.q2, "q2");
    adam_step(nets.v, grads.v, adam.v, "v");
    polyak_update(nets.v, nets.v_target, hyper.polyak_tau);
    return report;
}

}  // namespace gustnav
