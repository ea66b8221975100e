#include "gustnav/trainer.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gustnav/errors.hpp"

namespace gustnav {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* terminal_name(TerminalKind k) {
    switch (k) {
        case TerminalKind::kSuccess: return "success";
        case TerminalKind::kAltitudeFailure: return "altitude";
        case TerminalKind::kBudget: return "budget";
        case TerminalKind::kNone: return "none";
    }
    return "?";
}

Tensor vec_tensor(const std::vector<double>& v) {
    return Tensor{{v.size()}, v};
}

Tensor vec3_tensor(const Vec3& v) { return Tensor{{3}, {v.x, v.y, v.z}}; }

void add_param_set(Checkpoint& ckpt, const std::string& prefix, const ParamSet& p) {
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        ckpt.add(prefix + ".w" + std::to_string(l), p.weights[l]);
        ckpt.add(prefix + ".b" + std::to_string(l), p.biases[l]);
    }
}

void load_param_set(const Checkpoint& ckpt, const std::string& prefix, ParamSet& p) {
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const Tensor& w = ckpt.get(prefix + ".w" + std::to_string(l));
        const Tensor& b = ckpt.get(prefix + ".b" + std::to_string(l));
        if (!w.same_shape(p.weights[l]) || !b.same_shape(p.biases[l]))
            throw ParseError("checkpoint: shape mismatch for " + prefix + " layer " +
                             std::to_string(l));
        p.weights[l] = w;
        p.biases[l] = b;
    }
}

void add_adam(Checkpoint& ckpt, const std::string& prefix, const AdamState& st) {
    add_param_set(ckpt, prefix + ".m", st.first_moment);
    add_param_set(ckpt, prefix + ".v", st.second_moment);
    ckpt.add_scalar(prefix + ".step", static_cast<double>(st.step_count));
}

void load_adam(const Checkpoint& ckpt, const std::string& prefix, AdamState& st) {
    load_param_set(ckpt, prefix + ".m", st.first_moment);
    load_param_set(ckpt, prefix + ".v", st.second_moment);
    st.step_count = static_cast<long>(ckpt.get_scalar(prefix + ".step"));
}

}  // namespace

std::string episode_record_json(const EpisodeRecord& rec) {
    std::string s = "{\"episode\":" + std::to_string(rec.episode) +
                    ",\"global_step\":" + std::to_string(rec.global_step) +
                    ",\"steps\":" + std::to_string(rec.steps) +
                    ",\"total_reward\":" + fmt17(rec.total_reward) +
                    ",\"success\":" + (rec.success ? std::string("true") : std::string("false")) +
                    ",\"terminal\":\"" + terminal_name(rec.terminal) + "\"" +
                    ",\"d_reached\":" + fmt17(rec.d_reached) + "}";
    return s;
}

Trainer::Trainer(const RunConfig& cfg)
    : cfg_(resolve_wind_seeds(cfg)),
      field_(make_train_field(cfg_)),
      buffer_(cfg_.replay_capacity),
      rng_(cfg_.seed) {
    if (cfg_.scheme == Scheme::kFixedPoles)
        throw ConfigError("train: the fixed-poles scheme has no learnable parameters");
    init_fresh();
}

Trainer::Trainer(const RunConfig& cfg, const std::string& checkpoint_path)
    : cfg_(resolve_wind_seeds(cfg)),
      field_(make_train_field(cfg_)),
      buffer_(cfg_.replay_capacity),
      rng_(cfg_.seed) {
    if (cfg_.scheme == Scheme::kFixedPoles)
        throw ConfigError("train: the fixed-poles scheme has no learnable parameters");
    env_ = std::make_unique<MissionEnv>(cfg_.scheme, cfg_.train_env, &field_, cfg_.vehicle, true);
    nets_ = SacNetworks{};
    fresh_logs_ = false;
    restore_from(Checkpoint::load(checkpoint_path));
}

void Trainer::init_fresh() {
    env_ = std::make_unique<MissionEnv>(cfg_.scheme, cfg_.train_env, &field_, cfg_.vehicle, true);
    nets_ = SacNetworks::make(env_->state_dim(), env_->action_dim(), cfg_.hidden_dims,
                              cfg_.leaky_slope, rng_);
    adam_ = AdamStates::make(nets_, cfg_.sac.lr);
    env_->set_d_reached(curriculum_d_reached(0));
    state_ = env_->reset(rng_);
}

double Trainer::curriculum_d_reached(long step) const {
    const double frac = static_cast<double>(step) / static_cast<double>(cfg_.total_steps);
    if (frac < cfg_.curriculum.shrink2_fraction) return 3.0;
    if (frac < cfg_.curriculum.shrink1_fraction) return 2.0;
    return 1.0;
}

std::vector<double> Trainer::act(const std::vector<double>& state) {
    const std::vector<double> raw = mlp_forward(nets_.policy_spec, nets_.policy, state);
    const PolicyHeadOutput head = split_policy_output(raw);
    std::vector<double> noise(env_->action_dim());
    for (auto& v : noise) v = rng_.normal();
    return squashed_sample(head, env_->action_bounds(), noise).action;
}

void Trainer::log_episode(const EpisodeRecord& rec) {
    if (!file_logging_) return;
    if (!logs_initialized_) {
        std::filesystem::create_directories(cfg_.out_dir);
        if (fresh_logs_) {
            std::ofstream(cfg_.out_dir + "/train_episodes.jsonl", std::ios::trunc);
            std::ofstream csv(cfg_.out_dir + "/train_aggregates.csv", std::ios::trunc);
            csv << "episodes,mean_reward,success_rate\n";
        }
        logs_initialized_ = true;
    }
    std::ofstream jsonl(cfg_.out_dir + "/train_episodes.jsonl", std::ios::app);
    jsonl << episode_record_json(rec) << "\n";

    if (window_count_ == 100) {
        std::ofstream csv(cfg_.out_dir + "/train_aggregates.csv", std::ios::app);
        csv << (rec.episode + 1) << "," << fmt17(window_reward_sum_ / 100.0) << ","
            << fmt17(static_cast<double>(window_success_) / 100.0) << "\n";
    }
}

std::vector<EpisodeRecord> Trainer::run(long until_step) {
    const long target = until_step < 0 ? cfg_.total_steps : until_step;
    std::vector<EpisodeRecord> completed;

    while (global_step_ < target) {
        env_->set_d_reached(curriculum_d_reached(global_step_));
        const std::vector<double> action = act(state_);
        StepOutcome out = env_->step(action);
        const bool outcome_terminal = out.terminal == TerminalKind::kSuccess ||
                                      out.terminal == TerminalKind::kAltitudeFailure;
        buffer_.push(Transition{state_, action, out.reward, out.state, outcome_terminal});
        for (int u = 0; u < cfg_.sac.updates_per_step; ++u)
            train_step(nets_, adam_, buffer_, env_->action_bounds(), cfg_.sac, rng_);

        ++global_step_;
        ep_reward_ += out.reward;

        if (out.done) {
            EpisodeRecord rec;
            rec.episode = episode_;
            rec.global_step = global_step_;
            rec.steps = env_->episode_steps();
            rec.total_reward = ep_reward_;
            rec.success = out.terminal == TerminalKind::kSuccess;
            rec.terminal = out.terminal;
            rec.d_reached = env_->d_reached();

            window_reward_sum_ += rec.total_reward;
            window_success_ += rec.success ? 1 : 0;
            ++window_count_;
            log_episode(rec);
            if (window_count_ == 100) {
                window_reward_sum_ = 0.0;
                window_success_ = 0;
                window_count_ = 0;
            }
            completed.push_back(rec);

            ++episode_;
            ep_reward_ = 0.0;
            env_->set_d_reached(curriculum_d_reached(global_step_));
            state_ = env_->reset(rng_);
        } else {
            state_ = std::move(out.state);
        }

        if (cfg_.checkpoint_every > 0 && global_step_ % cfg_.checkpoint_every == 0)
            save_checkpoint(cfg_.out_dir + "/checkpoint_step" + std::to_string(global_step_) +
                            ".gnav");
    }
    if (global_step_ >= cfg_.total_steps && file_logging_) {
        std::filesystem::create_directories(cfg_.out_dir);
        save_checkpoint(cfg_.out_dir + "/checkpoint_final.gnav");
    }
    return completed;
}

void Trainer::save_checkpoint(const std::string& path) const {
    Checkpoint ckpt;
    add_param_set(ckpt, "policy", nets_.policy);
    add_param_set(ckpt, "q1", nets_.q1);
    add_param_set(ckpt, "q2", nets_.q2);
    add_param_set(ckpt, "v", nets_.v);
    add_param_set(ckpt, "v_target", nets_.v_target);
    add_adam(ckpt, "adam.policy", adam_.policy);
    add_adam(ckpt, "adam.q1", adam_.q1);
    add_adam(ckpt, "adam.q2", adam_.q2);
    add_adam(ckpt, "adam.v", adam_.v);

    const Normalizer& norm = env_->normalizer();
    ckpt.add("normalizer.mean", vec_tensor(norm.mean()));
    ckpt.add("normalizer.m2", vec_tensor(norm.m2()));
    ckpt.add_scalar("normalizer.count", static_cast<double>(norm.count()));

    const auto rng_state = rng_.state();
    ckpt.add_u64("rng.state", {rng_state.begin(), rng_state.end()});

    ckpt.add_scalar("trainer.global_step", static_cast<double>(global_step_));
    ckpt.add_scalar("trainer.episode", static_cast<double>(episode_));
    ckpt.add_scalar("trainer.ep_reward", ep_reward_);
    ckpt.add_scalar("trainer.window_reward_sum", window_reward_sum_);
    ckpt.add_scalar("trainer.window_success", static_cast<double>(window_success_));
    ckpt.add_scalar("trainer.window_count", static_cast<double>(window_count_));
    ckpt.add("trainer.state", vec_tensor(state_));

    const EnvSnapshot snap = env_->snapshot();
    ckpt.add("env.position", vec3_tensor(snap.vehicle.position));
    ckpt.add("env.velocity", vec3_tensor(snap.vehicle.velocity));
    ckpt.add("env.attitude", Tensor{{3},
                                    {snap.vehicle.attitude.roll, snap.vehicle.attitude.pitch,
                                     snap.vehicle.attitude.yaw}});
    ckpt.add("env.angular_rate", vec3_tensor(snap.vehicle.angular_rate));
    ckpt.add("env.target", vec3_tensor(snap.target));
    ckpt.add_scalar("env.d_prev", snap.d_prev);
    ckpt.add_scalar("env.steps", static_cast<double>(snap.steps));
    ckpt.add("env.last_cmd",
             Tensor{{3}, {snap.last_cmd.thrust, snap.last_cmd.roll_ref, snap.last_cmd.pitch_ref}});
    for (int h = 0; h < 3; ++h)
        ckpt.add("env.history" + std::to_string(h), vec_tensor(snap.history[h]));
    {
        Tensor taus = Tensor::zeros({9});
        Tensor ints = Tensor::zeros({3});
        Tensor errs = Tensor::zeros({3});
        for (int ch = 0; ch < 3; ++ch) {
            taus.data[3 * ch] = snap.taus[ch].t1;
            taus.data[3 * ch + 1] = snap.taus[ch].t2;
            taus.data[3 * ch + 2] = snap.taus[ch].t3;
            ints.data[ch] = snap.integrals[ch];
            errs.data[ch] = snap.last_errors[ch];
        }
        ckpt.add("env.taus", std::move(taus));
        ckpt.add("env.integrals", std::move(ints));
        ckpt.add("env.last_errors", std::move(errs));
    }
    ckpt.add_scalar("env.d_reached", snap.d_reached);

    // Replay contents ride along: bitwise resume is impossible without them.
    const std::size_t count = buffer_.size();
    const std::size_t sdim = env_->state_dim();
    const std::size_t adim = env_->action_dim();
    Tensor states = Tensor::zeros({count, sdim});
    Tensor actions = Tensor::zeros({count, adim});
    Tensor next_states = Tensor::zeros({count, sdim});
    Tensor rewards = Tensor::zeros({count});
    Tensor terminals = Tensor::zeros({count});
    for (std::size_t i = 0; i < count; ++i) {
        const Transition& tr = buffer_.slot(i);
        std::copy(tr.state.begin(), tr.state.end(), states.data.begin() + i * sdim);
        std::copy(tr.action.begin(), tr.action.end(), actions.data.begin() + i * adim);
        std::copy(tr.next_state.begin(), tr.next_state.end(),
                  next_states.data.begin() + i * sdim);
        rewards.data[i] = tr.reward;
        terminals.data[i] = tr.terminal ? 1.0 : 0.0;
    }
    ckpt.add("replay.states", std::move(states));
    ckpt.add("replay.actions", std::move(actions));
    ckpt.add("replay.next_states", std::move(next_states));
    ckpt.add("replay.rewards", std::move(rewards));
    ckpt.add("replay.terminals", std::move(terminals));
    ckpt.add_scalar("replay.write_index", static_cast<double>(buffer_.write_index()));

    ckpt.set_config_json(run_config_to_json(cfg_));
    ckpt.save(path);
}

void Trainer::restore_from(const Checkpoint& ckpt) {
    nets_ = SacNetworks::make(env_->state_dim(), env_->action_dim(), cfg_.hidden_dims,
                              cfg_.leaky_slope, rng_);
    adam_ = AdamStates::make(nets_, cfg_.sac.lr);

    load_param_set(ckpt, "policy", nets_.policy);
    load_param_set(ckpt, "q1", nets_.q1);
    load_param_set(ckpt, "q2", nets_.q2);
    load_param_set(ckpt, "v", nets_.v);
    load_param_set(ckpt, "v_target", nets_.v_target);
    load_adam(ckpt, "adam.policy", adam_.policy);
    load_adam(ckpt, "adam.q1", adam_.q1);
    load_adam(ckpt, "adam.q2", adam_.q2);
    load_adam(ckpt, "adam.v", adam_.v);

    Normalizer norm(env_->obs_dim());
    norm.restore(ckpt.get("normalizer.mean").data, ckpt.get("normalizer.m2").data,
                 static_cast<std::uint64_t>(ckpt.get_scalar("normalizer.count")));
    env_->set_normalizer(std::move(norm));

    const auto words = ckpt.get_u64("rng.state");
    if (words.size() != 4) throw ParseError("checkpoint: rng.state must hold 4 words");
    rng_.set_state({words[0], words[1], words[2], words[3]});

    global_step_ = static_cast<long>(ckpt.get_scalar("trainer.global_step"));
    episode_ = static_cast<long>(ckpt.get_scalar("trainer.episode"));
    ep_reward_ = ckpt.get_scalar("trainer.ep_reward");
    window_reward_sum_ = ckpt.get_scalar("trainer.window_reward_sum");
    window_success_ = static_cast<long>(ckpt.get_scalar("trainer.window_success"));
    window_count_ = static_cast<long>(ckpt.get_scalar("trainer.window_count"));
    state_ = ckpt.get("trainer.state").data;

    EnvSnapshot snap;
    const Tensor& pos = ckpt.get("env.position");
    snap.vehicle.position = {pos.data[0], pos.data[1], pos.data[2]};
    const Tensor& vel = ckpt.get("env.velocity");
    snap.vehicle.velocity = {vel.data[0], vel.data[1], vel.data[2]};
    const Tensor& att = ckpt.get("env.attitude");
    snap.vehicle.attitude = {att.data[0], att.data[1], att.data[2]};
    const Tensor& rate = ckpt.get("env.angular_rate");
    snap.vehicle.angular_rate = {rate.data[0], rate.data[1], rate.data[2]};
    const Tensor& tgt = ckpt.get("env.target");
    snap.target = {tgt.data[0], tgt.data[1], tgt.data[2]};
    snap.d_prev = ckpt.get_scalar("env.d_prev");
    snap.steps = static_cast<int>(ckpt.get_scalar("env.steps"));
    const Tensor& cmd = ckpt.get("env.last_cmd");
    snap.last_cmd = {cmd.data[0], cmd.data[1], cmd.data[2]};
    for (int h = 0; h < 3; ++h)
        snap.history[h] = ckpt.get("env.history" + std::to_string(h)).data;
    const Tensor& taus = ckpt.get("env.taus");
    const Tensor& ints = ckpt.get("env.integrals");
    const Tensor& errs = ckpt.get("env.last_errors");
    for (int ch = 0; ch < 3; ++ch) {
        snap.taus[ch] = {taus.data[3 * ch], taus.data[3 * ch + 1], taus.data[3 * ch + 2]};
        snap.integrals[ch] = ints.data[ch];
        snap.last_errors[ch] = errs.data[ch];
    }
    snap.d_reached = ckpt.get_scalar("env.d_reached");
    env_->restore(snap);

    const Tensor& states = ckpt.get("replay.states");
    const Tensor& actions = ckpt.get("replay.actions");
    const Tensor& next_states = ckpt.get("replay.next_states");
    const Tensor& rewards = ckpt.get("replay.rewards");
    const Tensor& terminals = ckpt.get("replay.terminals");
    const std::size_t count = rewards.data.size();
    const std::size_t sdim = env_->state_dim();
    const std::size_t adim = env_->action_dim();
    if (states.shape != std::vector<std::size_t>{count, sdim} ||
        actions.shape != std::vector<std::size_t>{count, adim})
        throw ParseError("checkpoint: replay tensor shapes are inconsistent");
    for (std::size_t i = 0; i < count; ++i) {
        Transition tr;
        tr.state.assign(states.data.begin() + i * sdim, states.data.begin() + (i + 1) * sdim);
        tr.action.assign(actions.data.begin() + i * adim, actions.data.begin() + (i + 1) * adim);
        tr.next_state.assign(next_states.data.begin() + i * sdim,
                             next_states.data.begin() + (i + 1) * sdim);
        tr.reward = rewards.data[i];
        tr.terminal = terminals.data[i] != 0.0;
        buffer_.restore_slot(std::move(tr));
    }
    buffer_.set_write_index(static_cast<std::size_t>(ckpt.get_scalar("replay.write_index")));
}

}  // namespace gustnav
