#include "gustnav/mission_env.hpp"

#include <algorithm>
#include <cmath>

#include "gustnav/errors.hpp"

namespace gustnav {

std::pair<double, TerminalKind> mission_reward(double d_t, double d_prev, double z_w,
                                               double d_reached) {
    if (d_t <= d_reached) return {1000.0, TerminalKind::kSuccess};
    if (z_w < 0.25 || z_w > 20.0) return {-550.0, TerminalKind::kAltitudeFailure};
    const double progress = d_prev - d_t;
    if (progress <= 0.0) return {-20.0, TerminalKind::kNone};
    const double ratio = d_t / (1.0 + progress) / 20.0;
    return {20.0 * std::exp(-ratio * ratio), TerminalKind::kNone};
}

Normalizer::Normalizer(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

void Normalizer::observe(std::span<const double> x) {
    if (x.size() != mean_.size()) throw ShapeError("Normalizer::observe: dimension mismatch");
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double delta = x[i] - mean_[i];
        mean_[i] += delta * inv;
        m2_[i] += delta * (x[i] - mean_[i]);
    }
}

std::vector<double> Normalizer::apply(std::span<const double> x) const {
    if (x.size() != mean_.size()) throw ShapeError("Normalizer::apply: dimension mismatch");
    std::vector<double> out(x.size());
    const double inv_count = count_ > 0 ? 1.0 / static_cast<double>(count_) : 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double var = m2_[i] * inv_count;
        const double v = (x[i] - mean_[i]) / std::sqrt(var + 1e-8);
        out[i] = std::clamp(v, -10.0, 10.0);
    }
    return out;
}

void Normalizer::restore(std::vector<double> mean, std::vector<double> m2, std::uint64_t count) {
    if (mean.size() != m2.size()) throw ShapeError("Normalizer::restore: dimension mismatch");
    mean_ = std::move(mean);
    m2_ = std::move(m2);
    count_ = count;
}

std::vector<double> build_state(const std::vector<double>& o_t, const std::vector<double>& o_tm1,
                                const std::vector<double>& o_tm2) {
    const std::size_t d = o_t.size();
    if (o_tm1.size() != d || o_tm2.size() != d)
        throw ShapeError("build_state: observation lengths differ");
    std::vector<double> s;
    s.reserve(6 * d);
    s.insert(s.end(), o_t.begin(), o_t.end());
    s.insert(s.end(), o_tm1.begin(), o_tm1.end());
    s.insert(s.end(), o_tm2.begin(), o_tm2.end());
    for (std::size_t i = 0; i < d; ++i) s.push_back(o_t[i] - o_tm1[i]);
    for (std::size_t i = 0; i < d; ++i) s.push_back(o_tm1[i] - o_tm2[i]);
    for (std::size_t i = 0; i < d; ++i) s.push_back((o_t[i] - o_tm1[i]) - (o_tm1[i] - o_tm2[i]));
    return s;
}

MissionEnv::MissionEnv(Scheme scheme, const EpisodeConfig& cfg, const WindField* wind,
                       const VehicleParams& vp, bool training)
    : scheme_(scheme),
      cfg_(cfg),
      wind_(wind),
      vp_(vp),
      training_(training),
      d_reached_(cfg.d_reached),
      controller_(ControllerParams::nominal()),
      normalizer_(scheme == Scheme::kModelFree ? 19 : 37) {}

ActionBounds MissionEnv::action_bounds() const {
    if (scheme_ == Scheme::kModelFree) {
        const double tilt = vp_.tilt_limit();
        ActionBounds b;
        b.lo = {-tilt, -tilt, vp_.thrust_min()};
        b.hi = {tilt, tilt, vp_.thrust_max()};
        return b;
    }
    return ActionBounds::uniform(9, -kIncrementLimit, kIncrementLimit);
}

Vec3 MissionEnv::sample_target(Rng& rng) const {
    for (;;) {
        // lo + (hi-lo)*(1-u) lands in (lo, hi], honoring the open inner edge
        // of the annulus.
        const double sx = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double mx = cfg_.xy_min + (cfg_.xy_max - cfg_.xy_min) * (1.0 - rng.uniform());
        const double sy = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double my = cfg_.xy_min + (cfg_.xy_max - cfg_.xy_min) * (1.0 - rng.uniform());
        const double z = cfg_.z_min + (cfg_.z_max - cfg_.z_min) * (1.0 - rng.uniform());
        const Vec3 target{sx * mx, sy * my, z};
        if (cfg_.max_target_distance > 0.0 &&
            (target - cfg_.spawn).norm() > cfg_.max_target_distance)
            continue;
        return target;
    }
}

std::vector<double> MissionEnv::reset(Rng& rng) {
    vehicle_ = MavState{};
    vehicle_.position = cfg_.spawn;
    target_ = sample_target(rng);
    d_prev_ = (vehicle_.position - target_).norm();
    steps_ = 0;
    last_cmd_ = ActuatorCmd{vp_.hover_thrust(), 0.0, 0.0};
    controller_ = ControllerParams::nominal();

    std::vector<double> obs =
        scheme_ == Scheme::kModelFree ? observe_mf() : observe_lb();
    if (training_) normalizer_.observe(obs);
    std::vector<double> nobs = normalizer_.apply(obs);
    history_[0] = nobs;
    history_[1] = nobs;
    history_[2] = nobs;
    return build_state(history_[0], history_[1], history_[2]);
}

std::vector<double> MissionEnv::observe_mf() const {
    std::vector<double> o;
    o.reserve(19);
    o.push_back(last_cmd_.roll_ref);
    o.push_back(last_cmd_.pitch_ref);
    o.push_back(last_cmd_.thrust);
    o.push_back(vehicle_.attitude.roll);
    o.push_back(vehicle_.attitude.pitch);
    o.push_back(vehicle_.attitude.yaw);
    o.push_back(vehicle_.velocity.x);
    o.push_back(vehicle_.velocity.y);
    o.push_back(vehicle_.velocity.z);
    o.push_back(vehicle_.angular_rate.x);
    o.push_back(vehicle_.angular_rate.y);
    o.push_back(vehicle_.angular_rate.z);
    o.push_back(vehicle_.position.x);
    o.push_back(vehicle_.position.y);
    o.push_back(vehicle_.position.z);
    const Vec3 e = vehicle_.position - target_;
    o.push_back(e.x);
    o.push_back(e.y);
    o.push_back(e.z);
    o.push_back(e.norm());
    return o;
}

std::vector<double> MissionEnv::observe_lb() const {
    std::vector<double> o;
    o.reserve(37);
    for (int ch = 0; ch < 3; ++ch) {
        o.push_back(controller_.taus[ch].t1);
        o.push_back(controller_.taus[ch].t2);
        o.push_back(controller_.taus[ch].t3);
    }
    o.push_back(last_cmd_.thrust);
    o.push_back(last_cmd_.pitch_ref);
    o.push_back(last_cmd_.roll_ref);
    for (int ch = 0; ch < 3; ++ch) {
        o.push_back(controller_.gains[ch].kp);
        o.push_back(controller_.gains[ch].ki);
        o.push_back(controller_.gains[ch].kd);
    }
    o.push_back(vehicle_.attitude.roll);
    o.push_back(vehicle_.attitude.pitch);
    o.push_back(vehicle_.attitude.yaw);
    o.push_back(vehicle_.velocity.x);
    o.push_back(vehicle_.velocity.y);
    o.push_back(vehicle_.velocity.z);
    o.push_back(vehicle_.angular_rate.x);
    o.push_back(vehicle_.angular_rate.y);
    o.push_back(vehicle_.angular_rate.z);
    o.push_back(vehicle_.position.x);
    o.push_back(vehicle_.position.y);
    o.push_back(vehicle_.position.z);
    const Vec3 e = vehicle_.position - target_;
    o.push_back(e.x);
    o.push_back(e.y);
    o.push_back(e.z);
    o.push_back(e.norm());
    return o;
}

StepOutcome MissionEnv::finish_step(bool clamped) {
    const double d_t = (vehicle_.position - target_).norm();
    const auto [r, kind] = mission_reward(d_t, d_prev_, vehicle_.position.z, d_reached_);

    StepOutcome out;
    out.reward = r;
    out.terminal = kind;
    out.clamped = clamped;
    out.distance = d_t;
    out.progress = d_prev_ - d_t;
    ++steps_;
    if (kind == TerminalKind::kNone && steps_ >= cfg_.max_steps)
        out.terminal = TerminalKind::kBudget;
    out.done = out.terminal != TerminalKind::kNone;

    std::vector<double> obs =
        scheme_ == Scheme::kModelFree ? observe_mf() : observe_lb();
    if (training_) normalizer_.observe(obs);
    history_[2] = std::move(history_[1]);
    history_[1] = std::move(history_[0]);
    history_[0] = normalizer_.apply(obs);
    out.state = build_state(history_[0], history_[1], history_[2]);

    d_prev_ = d_t;
    return out;
}

StepOutcome MissionEnv::step(std::span<const double> action) {
    if (action.size() != action_dim() && scheme_ != Scheme::kFixedPoles)
        throw ShapeError("MissionEnv::step: action dimension mismatch");

    bool clamped = false;
    if (scheme_ == Scheme::kModelFree) {
        const ActuatorCmd cmd{action[2], action[0], action[1]};
        bool cmd_clamped = false;
        vehicle_ = gustnav::step(vehicle_, cmd, *wind_, vp_, &cmd_clamped);
        clamped = cmd_clamped;
        last_cmd_ = clamp_cmd(cmd, vp_, nullptr);
    } else {
        if (scheme_ == Scheme::kLearningBased) {
            for (int ch = 0; ch < 3; ++ch) {
                std::array<double, 3> inc{action[3 * ch], action[3 * ch + 1], action[3 * ch + 2]};
                for (double v : inc)
                    if (std::abs(v) > kIncrementLimit) clamped = true;
                controller_.taus[ch] = apply_increments(controller_.taus[ch], inc);
            }
            controller_.refresh_gains();
        }
        const Vec3 pos_error = vehicle_.position - target_;
        const Vec3 u = controller_.control_accel(pos_error, vehicle_.velocity, vp_.dt_control);
        const ActuatorCmd cmd = accel_to_lowlevel(u, vehicle_.attitude.yaw, vp_);
        vehicle_ = gustnav::step(vehicle_, cmd, *wind_, vp_, nullptr);
        last_cmd_ = cmd;
    }
    return finish_step(clamped);
}

EnvSnapshot MissionEnv::snapshot() const {
    EnvSnapshot s;
    s.vehicle = vehicle_;
    s.target = target_;
    s.d_prev = d_prev_;
    s.steps = steps_;
    s.last_cmd = last_cmd_;
    s.history = history_;
    for (int ch = 0; ch < 3; ++ch) {
        s.taus[ch] = controller_.taus[ch];
        s.integrals[ch] = controller_.state[ch].integral;
        s.last_errors[ch] = controller_.state[ch].last_error;
    }
    s.d_reached = d_reached_;
    return s;
}

void MissionEnv::restore(const EnvSnapshot& s) {
    vehicle_ = s.vehicle;
    target_ = s.target;
    d_prev_ = s.d_prev;
    steps_ = s.steps;
    last_cmd_ = s.last_cmd;
    history_ = s.history;
    for (int ch = 0; ch < 3; ++ch) {
        controller_.taus[ch] = s.taus[ch];
        controller_.state[ch].integral = s.integrals[ch];
        controller_.state[ch].last_error = s.last_errors[ch];
    }
    controller_.refresh_gains();
    d_reached_ = s.d_reached;
}

}  // namespace gustnav
