#include "gustnav/evaluator.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <thread>

#include "gustnav/errors.hpp"

namespace gustnav {

namespace {

constexpr std::uint64_t kEvalEpisodeStream = 0x6576616cULL;  // "eval"

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

EvalEpisode run_one(const RunConfig& cfg, const SacNetworks* nets, const Normalizer* norm,
                    const WindField& field, int index) {
    MissionEnv env(cfg.scheme, cfg.eval_env, &field, cfg.vehicle, /*training=*/false);
    if (norm) env.set_normalizer(*norm);
    env.set_d_reached(cfg.eval_env.d_reached);
    Rng rng(Rng::mix(cfg.seed, kEvalEpisodeStream + static_cast<std::uint64_t>(index)));

    std::vector<double> state = env.reset(rng);
    const ActionBounds bounds = env.action_bounds();
    EvalEpisode ep;
    for (;;) {
        std::vector<double> action;
        if (cfg.scheme != Scheme::kFixedPoles) {
            const std::vector<double> raw = mlp_forward(nets->policy_spec, nets->policy, state);
            action = squash_mean(split_policy_output(raw), bounds);
        }
        const StepOutcome out = env.step(action);
        ep.total_reward += out.reward;
        if (out.reward > 0.0) ++ep.positive_steps;
        ++ep.steps;
        if (out.done) {
            ep.success = out.terminal == TerminalKind::kSuccess;
            ep.terminal = out.terminal;
            break;
        }
        state = out.state;
    }
    return ep;
}

}  // namespace

EvalMetrics aggregate_metrics(const std::vector<EvalEpisode>& episodes) {
    EvalMetrics m;
    if (episodes.empty()) return m;
    double reward_sum = 0.0;
    long step_sum = 0;
    long positive = 0;
    long successes = 0;
    for (const EvalEpisode& ep : episodes) {
        reward_sum += ep.total_reward;
        step_sum += ep.steps;
        positive += ep.positive_steps;
        successes += ep.success ? 1 : 0;
    }
    const double n = static_cast<double>(episodes.size());
    m.mean_step_number = static_cast<double>(step_sum) / n;
    m.mean_total_reward = reward_sum / n;
    m.mean_reward_per_step = reward_sum / static_cast<double>(step_sum);
    m.success_rate = static_cast<double>(successes) / n;
    m.positive_reward_rate = static_cast<double>(positive) / static_cast<double>(step_sum);
    return m;
}

EvalMetrics run_eval(const RunConfig& cfg, const SacNetworks* nets, const Normalizer* norm,
                     const WindField& field, std::vector<EvalEpisode>* per_episode) {
    if (cfg.scheme != Scheme::kFixedPoles && nets == nullptr)
        throw ConfigError("eval: mf/lb schemes require a checkpoint");

    std::vector<EvalEpisode> episodes(static_cast<std::size_t>(cfg.eval_episodes));
    if (cfg.eval_workers <= 1) {
        for (int i = 0; i < cfg.eval_episodes; ++i)
            episodes[static_cast<std::size_t>(i)] = run_one(cfg, nets, norm, field, i);
    } else {
        // Workers pull indices from a shared counter; results land in
        // index-addressed slots so aggregation order never depends on timing.
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= cfg.eval_episodes) return;
                episodes[static_cast<std::size_t>(i)] = run_one(cfg, nets, norm, field, i);
            }
        };
        std::vector<std::thread> pool;
        const int n_threads = std::min(cfg.eval_workers, cfg.eval_episodes);
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (per_episode) *per_episode = episodes;
    return aggregate_metrics(episodes);
}

void write_episode_csv(const std::string& path, const std::vector<EvalEpisode>& episodes) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "episode,steps,total_reward,success,terminal,positive_steps\n";
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        const EvalEpisode& ep = episodes[i];
        out << i << "," << ep.steps << "," << fmt17(ep.total_reward) << ","
            << (ep.success ? 1 : 0) << "," << terminal_name(ep.terminal) << ","
            << ep.positive_steps << "\n";
    }
}

std::string metrics_json(const EvalMetrics& m) {
    return std::string("{\"mean_step_number\":") + fmt17(m.mean_step_number) +
           ",\"mean_total_reward\":" + fmt17(m.mean_total_reward) +
           ",\"mean_reward_per_step\":" + fmt17(m.mean_reward_per_step) +
           ",\"success_rate\":" + fmt17(m.success_rate) +
           ",\"positive_reward_rate\":" + fmt17(m.positive_reward_rate) + "}";
}

}  // namespace gustnav
