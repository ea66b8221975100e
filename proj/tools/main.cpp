// gustnav: train, evaluate and compare waypoint-rallying controllers for a
// simulated hexacopter under procedurally generated wind fields.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "gustnav/checkpoint.hpp"
#include "gustnav/config.hpp"
#include "gustnav/errors.hpp"
#include "gustnav/evaluator.hpp"
#include "gustnav/mission_env.hpp"
#include "gustnav/trainer.hpp"
#include "gustnav/wind_field.hpp"

namespace {

using namespace gustnav;

struct CommonArgs {
    std::string config_path;
    std::string scheme;
    long steps = -1;
    std::int64_t seed = -1;
    std::string out_dir;
    int episodes = -1;
};

CliOverrides to_overrides(const CommonArgs& a) {
    CliOverrides ov;
    if (!a.scheme.empty()) ov.scheme = a.scheme;
    if (a.steps >= 0) ov.total_steps = a.steps;
    if (a.seed >= 0) ov.seed = static_cast<std::uint64_t>(a.seed);
    if (!a.out_dir.empty()) ov.out_dir = a.out_dir;
    if (a.episodes >= 0) ov.eval_episodes = a.episodes;
    return ov;
}

int cmd_train(const CommonArgs& args, const std::string& resume_path) {
    RunConfig cfg = load_run_config(args.config_path, to_overrides(args));
    std::unique_ptr<Trainer> trainer;
    if (resume_path.empty())
        trainer = std::make_unique<Trainer>(cfg);
    else
        trainer = std::make_unique<Trainer>(cfg, resume_path);

    std::cout << "training scheme=" << scheme_name(cfg.scheme) << " steps=" << cfg.total_steps
              << " seed=" << cfg.seed << " out=" << cfg.out_dir << "\n";
    trainer->run();
    std::cout << "done: " << trainer->episode_count() << " episodes, checkpoint at "
              << cfg.out_dir << "/checkpoint_final.gnav\n";
    return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& checkpoint_path) {
    RunConfig cfg;
    std::unique_ptr<SacNetworks> nets;
    std::unique_ptr<Normalizer> norm;

    if (!checkpoint_path.empty()) {
        const Checkpoint ckpt = Checkpoint::load(checkpoint_path);
        // The embedded config supplies every setting the file does not override.
        if (!args.config_path.empty())
            cfg = load_run_config(args.config_path, to_overrides(args));
        else
            cfg = run_config_from_json(ckpt.config_json(), to_overrides(args));
        if (cfg.scheme == Scheme::kFixedPoles)
            throw ConfigError("eval: a checkpoint was given but the scheme is fixed");

        // Rebuild network shapes from the config, then fill from the file.
        Rng init_rng(0);
        const std::size_t obs = cfg.scheme == Scheme::kModelFree ? 19 : 37;
        const std::size_t adim = cfg.scheme == Scheme::kModelFree ? 3 : 9;
        nets = std::make_unique<SacNetworks>(
            SacNetworks::make(6 * obs, adim, cfg.hidden_dims, cfg.leaky_slope, init_rng));
        for (std::size_t l = 0; l < nets->policy.weights.size(); ++l) {
            const std::string w = "policy.w" + std::to_string(l);
            const std::string b = "policy.b" + std::to_string(l);
            if (!ckpt.get(w).same_shape(nets->policy.weights[l]))
                throw ParseError("checkpoint: policy layer " + std::to_string(l) +
                                 " does not match the configured network size");
            nets->policy.weights[l] = ckpt.get(w);
            nets->policy.biases[l] = ckpt.get(b);
        }
        norm = std::make_unique<Normalizer>(obs);
        norm->restore(ckpt.get("normalizer.mean").data, ckpt.get("normalizer.m2").data,
                      static_cast<std::uint64_t>(ckpt.get_scalar("normalizer.count")));
    } else {
        cfg = load_run_config(args.config_path, to_overrides(args));
        if (cfg.scheme != Scheme::kFixedPoles)
            throw ConfigError("eval: mf/lb schemes require --checkpoint");
    }

    const WindField field = make_eval_field(resolve_wind_seeds(cfg));
    std::vector<EvalEpisode> episodes;
    const EvalMetrics metrics = run_eval(cfg, nets.get(), norm.get(), field, &episodes);

    std::filesystem::create_directories(cfg.out_dir);
    write_episode_csv(cfg.out_dir + "/eval_episodes.csv", episodes);
    std::ofstream mjson(cfg.out_dir + "/eval_metrics.json", std::ios::trunc);
    mjson << metrics_json(metrics) << "\n";

    std::cout << "scheme=" << scheme_name(cfg.scheme) << " episodes=" << cfg.eval_episodes << "\n"
              << "  mean_step_number     " << metrics.mean_step_number << "\n"
              << "  mean_total_reward    " << metrics.mean_total_reward << "\n"
              << "  mean_reward_per_step " << metrics.mean_reward_per_step << "\n"
              << "  success_rate         " << metrics.success_rate << "\n"
              << "  positive_reward_rate " << metrics.positive_reward_rate << "\n";
    return 0;
}

int cmd_windgen(const std::string& spec_path, const std::string& out_path) {
    const WindGenSpec spec = load_windgen_spec(spec_path);
    const WindField field = generate_procedural(spec.gust, spec.extent, spec.spacing);
    save_field(field, out_path);
    std::cout << "wrote " << out_path << " (" << field.dims[0] << "x" << field.dims[1] << "x"
              << field.dims[2] << " vertices)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MAV waypoint rallying under wind: SAC training and evaluation"};
    app.require_subcommand(1);

    CommonArgs targs, eargs;
    std::string resume_path, checkpoint_path, spec_path, wind_out;

    CLI::App* train = app.add_subcommand("train", "train a controller");
    train->add_option("--config", targs.config_path, "JSON config file");
    train->add_option("--scheme", targs.scheme, "mf|lb");
    train->add_option("--steps", targs.steps, "total environment steps");
    train->add_option("--seed", targs.seed, "run seed");
    train->add_option("--out", targs.out_dir, "output directory");
    train->add_option("--resume", resume_path, "checkpoint to resume from");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a controller");
    eval->add_option("--config", eargs.config_path, "JSON config file");
    eval->add_option("--checkpoint", checkpoint_path, "trained checkpoint (mf/lb)");
    eval->add_option("--scheme", eargs.scheme, "mf|lb|fixed");
    eval->add_option("--episodes", eargs.episodes, "evaluation episode count");
    eval->add_option("--seed", eargs.seed, "run seed");
    eval->add_option("--out", eargs.out_dir, "output directory");

    CLI::App* windgen = app.add_subcommand("windgen", "generate a WINDGRID file");
    windgen->add_option("--spec", spec_path, "gust spec JSON")->required();
    windgen->add_option("--out", wind_out, "output WINDGRID path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) return cmd_train(targs, resume_path);
        if (eval->parsed()) return cmd_eval(eargs, checkpoint_path);
        if (windgen->parsed()) return cmd_windgen(spec_path, wind_out);
    } catch (const gustnav::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
