#pragma once

#include <string>
#include <vector>

#include "gustnav/config.hpp"
#include "gustnav/mission_env.hpp"
#include "gustnav/sac.hpp"
#include "gustnav/wind_field.hpp"

namespace gustnav {

struct EvalMetrics {
    double mean_step_number = 0.0;
    double mean_total_reward = 0.0;
    double mean_reward_per_step = 0.0;  // sum of rewards / sum of steps
    double success_rate = 0.0;
    double positive_reward_rate = 0.0;  // steps with r > 0 / total steps
};

struct EvalEpisode {
    int steps = 0;
    double total_reward = 0.0;
    bool success = false;
    TerminalKind terminal = TerminalKind::kNone;
    long positive_steps = 0;
};

// Runs cfg.eval_episodes deterministic episodes (policy = squash of the
// mean; nets may be null for the fixed-poles scheme). Episode i draws its
// target from a stream derived from (seed, i), so the schedule is identical
// for every controller under one seed and independent of worker count.
EvalMetrics run_eval(const RunConfig& cfg, const SacNetworks* nets, const Normalizer* norm,
                     const WindField& field, std::vector<EvalEpisode>* per_episode = nullptr);

EvalMetrics aggregate_metrics(const std::vector<EvalEpisode>& episodes);

// "episode,steps,total_reward,success,terminal,positive_steps" rows.
void write_episode_csv(const std::string& path, const std::vector<EvalEpisode>& episodes);
std::string metrics_json(const EvalMetrics& m);

}  // namespace gustnav
