#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gustnav/policy.hpp"
#include "gustnav/pole_controller.hpp"
#include "gustnav/rng.hpp"
#include "gustnav/vehicle.hpp"
#include "gustnav/wind_field.hpp"

namespace gustnav {

enum class Scheme { kModelFree, kLearningBased, kFixedPoles };

struct EpisodeConfig {
    // |target_x|, |target_y| drawn from (xy_min, xy_max]; target_z from
    // (z_min, z_max]. max_target_distance > 0 rejects draws farther than
    // that from the spawn point.
    double xy_min = 5.0;
    double xy_max = 20.0;
    double z_min = 2.0;
    double z_max = 20.0;
    double max_target_distance = 0.0;
    double d_reached = 3.0;
    int max_steps = 300;
    Vec3 spawn{0.0, 0.0, 3.0};
};

enum class TerminalKind { kNone, kSuccess, kAltitudeFailure, kBudget };

// Reward branches in precedence order: target reached (+1000), altitude
// corridor left (-550), no progress (-20), otherwise the shaped forward
// reward 20*exp(-[(d_t/(1+progress))/20]^2) with progress = d_prev - d_t.
std::pair<double, TerminalKind> mission_reward(double d_t, double d_prev, double z_w,
                                               double d_reached);

// Running per-entry standardization (Welford), output clipped to [-10, 10].
class Normalizer {
public:
    explicit Normalizer(std::size_t dim = 0);

    void observe(std::span<const double> x);
    std::vector<double> apply(std::span<const double> x) const;

    std::size_t dim() const { return mean_.size(); }
    std::uint64_t count() const { return count_; }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& m2() const { return m2_; }
    void restore(std::vector<double> mean, std::vector<double> m2, std::uint64_t count);

private:
    std::vector<double> mean_;
    std::vector<double> m2_;  // sum of squared deviations
    std::uint64_t count_ = 0;
};

// [o_t; o_{t-1}; o_{t-2}; o_t-o_{t-1}; o_{t-1}-o_{t-2}; second difference]
std::vector<double> build_state(const std::vector<double>& o_t, const std::vector<double>& o_tm1,
                                const std::vector<double>& o_tm2);

struct StepOutcome {
    std::vector<double> state;
    double reward = 0.0;
    bool done = false;
    TerminalKind terminal = TerminalKind::kNone;
    bool clamped = false;
    double distance = 0.0;
    double progress = 0.0;
};

// Everything an episode carries between steps; serialized into checkpoints
// so training resumes mid-episode bit-for-bit.
struct EnvSnapshot {
    MavState vehicle;
    Vec3 target;
    double d_prev = 0.0;
    int steps = 0;
    ActuatorCmd last_cmd;
    std::array<std::vector<double>, 3> history;  // normalized o_t, o_{t-1}, o_{t-2}
    std::array<AxisTaus, 3> taus;
    std::array<double, 3> integrals;
    std::array<double, 3> last_errors;
    double d_reached = 3.0;
};

// Waypoint-rallying episode driver for the three control schemes. The wind
// field is borrowed and must outlive the environment.
class MissionEnv {
public:
    MissionEnv(Scheme scheme, const EpisodeConfig& cfg, const WindField* wind,
               const VehicleParams& vp, bool training);

    std::vector<double> reset(Rng& rng);
    StepOutcome step(std::span<const double> action);

    std::size_t obs_dim() const { return scheme_ == Scheme::kModelFree ? 19 : 37; }
    std::size_t state_dim() const { return 6 * obs_dim(); }
    std::size_t action_dim() const { return scheme_ == Scheme::kModelFree ? 3 : 9; }
    ActionBounds action_bounds() const;

    Scheme scheme() const { return scheme_; }
    void set_d_reached(double d) { d_reached_ = d; }
    double d_reached() const { return d_reached_; }

    Normalizer& normalizer() { return normalizer_; }
    const Normalizer& normalizer() const { return normalizer_; }
    void set_normalizer(Normalizer n) { normalizer_ = std::move(n); }

    const MavState& vehicle() const { return vehicle_; }
    const Vec3& target() const { return target_; }
    const ControllerParams& controller() const { return controller_; }
    int episode_steps() const { return steps_; }

    EnvSnapshot snapshot() const;
    void restore(const EnvSnapshot& snap);

private:
    std::vector<double> observe_mf() const;
    std::vector<double> observe_lb() const;
    StepOutcome finish_step(bool clamped);
    Vec3 sample_target(Rng& rng) const;

    Scheme scheme_;
    EpisodeConfig cfg_;
    const WindField* wind_;
    VehicleParams vp_;
    bool training_;

    MavState vehicle_;
    Vec3 target_;
    double d_prev_ = 0.0;
    double d_reached_ = 3.0;
    int steps_ = 0;
    ActuatorCmd last_cmd_;
    ControllerParams controller_;
    Normalizer normalizer_;
    std::array<std::vector<double>, 3> history_;
};

}  // namespace gustnav
