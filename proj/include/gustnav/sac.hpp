#pragma once

#include <optional>
#include <vector>

#include "gustnav/adam.hpp"
#include "gustnav/mlp.hpp"
#include "gustnav/policy.hpp"
#include "gustnav/replay_buffer.hpp"
#include "gustnav/rng.hpp"

namespace gustnav {

// Actor, twin critics, state-value net and its slow-moving target copy.
struct SacNetworks {
    MlpSpec policy_spec;  // state_dim -> 2*action_dim (mean, log_std)
    MlpSpec q_spec;       // state_dim + action_dim -> 1
    MlpSpec v_spec;       // state_dim -> 1

    ParamSet policy;
    ParamSet q1;
    ParamSet q2;
    ParamSet v;
    ParamSet v_target;

    std::size_t state_dim() const { return policy_spec.input_dim; }
    std::size_t action_dim() const { return policy_spec.output_dim / 2; }

    static SacNetworks make(std::size_t state_dim, std::size_t action_dim,
                            const std::vector<std::size_t>& hidden_dims, double leaky_slope,
                            Rng& rng);
};

struct SacHyper {
    double gamma = 0.99;
    double alpha = 1.0;        // fixed entropy temperature
    double polyak_tau = 5e-3;
    std::size_t batch_size = 256;
    double lr = 3e-4;
    int updates_per_step = 1;
};

struct LossReport {
    double q1_loss = 0.0;
    double q2_loss = 0.0;
    double v_loss = 0.0;
    double policy_loss = 0.0;
    double mean_q = 0.0;       // min(Q1,Q2) at replay actions
    double mean_entropy = 0.0; // -log pi at fresh samples
};

struct SacGradients {
    ParamSet policy;
    ParamSet q1;
    ParamSet q2;
    ParamSet v;

    static SacGradients zeros(const SacNetworks& nets);
    void fill_zero();
};

struct AdamStates {
    AdamState policy;
    AdamState q1;
    AdamState q2;
    AdamState v;

    static AdamStates make(const SacNetworks& nets, double lr);
};

// Bootstrapped soft Q target: r + gamma * Vbar(s') on non-terminal
// transitions, r alone on terminal ones.
double q_target(double reward, bool terminal, double v_target_next, double gamma);

// Soft state-value target: min(q1, q2) - alpha * log_prob, evaluated at an
// action freshly sampled from the current policy.
double v_target_value(double q1, double q2, double log_prob, double alpha);

// target <- (1 - tau) * target + tau * online, entrywise.
void polyak_update(const ParamSet& online, ParamSet& target, double tau);

// All four losses and their parameter gradients from one batch:
//   q losses:     mean of 0.5*(Q(s,a) - (r + gamma*Vbar(s')))^2
//   v loss:       mean of 0.5*(V(s) - [min Q(s,a~) - alpha*log pi(a~|s)])^2
//   policy loss:  mean of alpha*log pi(a~|s) - min Q(s,a~)
// with a~ reparameterized through `noise` (batch-major, action_dim per row)
// so the policy gradient flows through both the sampled action and its
// log-density. Gradients are written (not accumulated) into `grads`.
LossReport compute_losses(const SacNetworks& nets, const std::vector<const Transition*>& batch,
                          const ActionBounds& bounds, const SacHyper& hyper,
                          const std::vector<double>& noise, SacGradients& grads);

LossReport compute_losses(const SacNetworks& nets, const std::vector<const Transition*>& batch,
                          const ActionBounds& bounds, const SacHyper& hyper, Rng& rng,
                          SacGradients& grads);

// One CER batch, one Adam step per network, one polyak update. No-op (and
// nullopt) while the buffer holds fewer than batch_size transitions.
std::optional<LossReport> train_step(SacNetworks& nets, AdamStates& adam, ReplayBuffer& buffer,
                                     const ActionBounds& bounds, const SacHyper& hyper, Rng& rng);

}  // namespace gustnav
