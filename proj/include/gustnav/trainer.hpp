#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gustnav/checkpoint.hpp"
#include "gustnav/config.hpp"
#include "gustnav/mission_env.hpp"
#include "gustnav/replay_buffer.hpp"
#include "gustnav/sac.hpp"

namespace gustnav {

struct EpisodeRecord {
    long episode = 0;
    long global_step = 0;  // step count when the episode ended
    int steps = 0;
    double total_reward = 0.0;
    bool success = false;
    TerminalKind terminal = TerminalKind::kNone;
    double d_reached = 0.0;
};

std::string episode_record_json(const EpisodeRecord& rec);

// Owns the full training state: environment, networks, optimizer, replay
// buffer, RNG and log aggregation. Checkpoints capture all of it, so a
// resumed run replays the remaining steps bit-for-bit.
class Trainer {
public:
    explicit Trainer(const RunConfig& cfg);
    Trainer(const RunConfig& cfg, const std::string& checkpoint_path);

    // Advances training to the given step count (cfg.total_steps by default),
    // appending episode logs. Returns the records of episodes completed
    // during this call.
    std::vector<EpisodeRecord> run(long until_step = -1);

    void save_checkpoint(const std::string& path) const;

    const RunConfig& config() const { return cfg_; }
    long global_step() const { return global_step_; }
    long episode_count() const { return episode_; }
    const SacNetworks& networks() const { return nets_; }
    const Normalizer& normalizer() const { return env_->normalizer(); }
    const ReplayBuffer& buffer() const { return buffer_; }
    const WindField& train_field() const { return field_; }

    // Writes JSONL episode records / CSV aggregates to out_dir when enabled.
    void set_file_logging(bool enabled) { file_logging_ = enabled; }

private:
    void init_fresh();
    void restore_from(const Checkpoint& ckpt);
    std::vector<double> act(const std::vector<double>& state);
    double curriculum_d_reached(long step) const;
    void log_episode(const EpisodeRecord& rec);

    RunConfig cfg_;
    WindField field_;
    std::unique_ptr<MissionEnv> env_;
    SacNetworks nets_;
    AdamStates adam_;
    ReplayBuffer buffer_;
    Rng rng_{0};

    long global_step_ = 0;
    long episode_ = 0;
    double ep_reward_ = 0.0;
    std::vector<double> state_;

    // per-100-episode aggregation window
    double window_reward_sum_ = 0.0;
    long window_success_ = 0;
    long window_count_ = 0;

    bool file_logging_ = true;
    bool logs_initialized_ = false;
    bool fresh_logs_ = true;  // resume appends instead of truncating
};

}  // namespace gustnav
