#include "gustnav/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gustnav/errors.hpp"

namespace gustnav {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& ctx, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("config: unknown key '" + it.key() + "' in " + ctx);
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void read_vec3(const json& j, const char* key, Vec3& out) {
    if (!j.contains(key)) return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 3)
        throw ConfigError(std::string("config: '") + key + "' must be an array of 3 numbers");
    out = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

void read_range(const json& j, const char* key, double& lo, double& hi) {
    if (!j.contains(key)) return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 2)
        throw ConfigError(std::string("config: '") + key + "' must be an array of 2 numbers");
    lo = a[0].get<double>();
    hi = a[1].get<double>();
}

void parse_gust(const json& j, const std::string& ctx, GustSpec& g, bool& seed_set) {
    check_keys(j, ctx,
               {"base", "mode_count", "amplitude_range", "wavelength_range", "clip", "seed"});
    read_vec3(j, "base", g.base);
    read(j, "mode_count", g.mode_count);
    read_range(j, "amplitude_range", g.amplitude_min, g.amplitude_max);
    read_range(j, "wavelength_range", g.wavelength_min, g.wavelength_max);
    read_range(j, "clip", g.clip_min, g.clip_max);
    if (j.contains("seed")) {
        g.seed = j.at("seed").get<std::uint64_t>();
        seed_set = true;
    }
    if (g.clip_min > g.clip_max) throw ConfigError("config: " + ctx + " clip bounds out of order");
}

void parse_episode(const json& j, const std::string& ctx, EpisodeConfig& e) {
    check_keys(j, ctx,
               {"xy_min", "xy_max", "z_min", "z_max", "max_target_distance", "max_steps",
                "d_reached", "spawn"});
    read(j, "xy_min", e.xy_min);
    read(j, "xy_max", e.xy_max);
    read(j, "z_min", e.z_min);
    read(j, "z_max", e.z_max);
    read(j, "max_target_distance", e.max_target_distance);
    read(j, "max_steps", e.max_steps);
    read(j, "d_reached", e.d_reached);
    read_vec3(j, "spawn", e.spawn);
    if (e.xy_min <= 0.0 || e.xy_max < e.xy_min || e.z_max < e.z_min || e.max_steps <= 0)
        throw ConfigError("config: invalid " + ctx + " geometry");
}

json gust_to_json(const GustSpec& g) {
    return json{{"base", {g.base.x, g.base.y, g.base.z}},
                {"mode_count", g.mode_count},
                {"amplitude_range", {g.amplitude_min, g.amplitude_max}},
                {"wavelength_range", {g.wavelength_min, g.wavelength_max}},
                {"clip", {g.clip_min, g.clip_max}},
                {"seed", g.seed}};
}

json episode_to_json(const EpisodeConfig& e) {
    return json{{"xy_min", e.xy_min},
                {"xy_max", e.xy_max},
                {"z_min", e.z_min},
                {"z_max", e.z_max},
                {"max_target_distance", e.max_target_distance},
                {"max_steps", e.max_steps},
                {"d_reached", e.d_reached},
                {"spawn", {e.spawn.x, e.spawn.y, e.spawn.z}}};
}

RunConfig parse_config_json(const json& root, const CliOverrides& ov) {
    RunConfig cfg = RunConfig::defaults();
    check_keys(root, "top level",
               {"scheme", "total_steps", "seed", "eval_episodes", "out_dir", "sac", "vehicle",
                "train_env", "eval_env", "wind", "replay_capacity", "checkpoint_every",
                "eval_workers", "curriculum"});

    if (root.contains("scheme")) cfg.scheme = parse_scheme(root.at("scheme").get<std::string>());
    read(root, "total_steps", cfg.total_steps);
    read(root, "seed", cfg.seed);
    read(root, "eval_episodes", cfg.eval_episodes);
    read(root, "out_dir", cfg.out_dir);
    read(root, "replay_capacity", cfg.replay_capacity);
    read(root, "checkpoint_every", cfg.checkpoint_every);
    read(root, "eval_workers", cfg.eval_workers);

    if (root.contains("sac")) {
        const json& s = root.at("sac");
        check_keys(s, "sac",
                   {"gamma", "alpha", "polyak_tau", "batch_size", "lr", "updates_per_step",
                    "hidden_dims", "leaky_slope"});
        read(s, "gamma", cfg.sac.gamma);
        read(s, "alpha", cfg.sac.alpha);
        read(s, "polyak_tau", cfg.sac.polyak_tau);
        read(s, "batch_size", cfg.sac.batch_size);
        read(s, "lr", cfg.sac.lr);
        read(s, "updates_per_step", cfg.sac.updates_per_step);
        read(s, "hidden_dims", cfg.hidden_dims);
        read(s, "leaky_slope", cfg.leaky_slope);
        if (cfg.sac.gamma <= 0.0 || cfg.sac.gamma >= 1.0)
            throw ConfigError("config: sac.gamma must be in (0,1)");
        if (cfg.sac.polyak_tau <= 0.0 || cfg.sac.polyak_tau > 1.0)
            throw ConfigError("config: sac.polyak_tau must be in (0,1]");
        if (cfg.sac.alpha < 0.0) throw ConfigError("config: sac.alpha must be >= 0");
        if (cfg.sac.batch_size == 0) throw ConfigError("config: sac.batch_size must be >= 1");
    }
    if (root.contains("vehicle")) {
        const json& v = root.at("vehicle");
        check_keys(v, "vehicle",
                   {"mass", "gravity", "attitude_lag", "wind_drag", "dt_control",
                    "physics_substeps"});
        read(v, "mass", cfg.vehicle.mass);
        read(v, "gravity", cfg.vehicle.gravity);
        read(v, "attitude_lag", cfg.vehicle.attitude_lag);
        read(v, "wind_drag", cfg.vehicle.wind_drag);
        read(v, "dt_control", cfg.vehicle.dt_control);
        read(v, "physics_substeps", cfg.vehicle.physics_substeps);
        if (cfg.vehicle.mass <= 0.0 || cfg.vehicle.gravity <= 0.0 ||
            cfg.vehicle.attitude_lag <= 0.0 || cfg.vehicle.dt_control <= 0.0 ||
            cfg.vehicle.physics_substeps <= 0)
            throw ConfigError("config: vehicle parameters must be positive");
    }
    if (root.contains("train_env")) parse_episode(root.at("train_env"), "train_env", cfg.train_env);
    if (root.contains("eval_env")) parse_episode(root.at("eval_env"), "eval_env", cfg.eval_env);
    if (root.contains("wind")) {
        const json& w = root.at("wind");
        check_keys(w, "wind",
                   {"train", "eval", "train_file", "eval_file", "extent_min", "extent_max",
                    "spacing"});
        if (w.contains("train"))
            parse_gust(w.at("train"), "wind.train", cfg.wind.train, cfg.wind.train_seed_set);
        if (w.contains("eval"))
            parse_gust(w.at("eval"), "wind.eval", cfg.wind.eval, cfg.wind.eval_seed_set);
        read(w, "train_file", cfg.wind.train_file);
        read(w, "eval_file", cfg.wind.eval_file);
        read_vec3(w, "extent_min", cfg.wind.extent.min);
        read_vec3(w, "extent_max", cfg.wind.extent.max);
        read_vec3(w, "spacing", cfg.wind.spacing);
    }
    if (root.contains("curriculum")) {
        const json& c = root.at("curriculum");
        check_keys(c, "curriculum", {"shrink2_fraction", "shrink1_fraction"});
        read(c, "shrink2_fraction", cfg.curriculum.shrink2_fraction);
        read(c, "shrink1_fraction", cfg.curriculum.shrink1_fraction);
    }

    if (ov.scheme) cfg.scheme = parse_scheme(*ov.scheme);
    if (ov.total_steps) cfg.total_steps = *ov.total_steps;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.eval_episodes) cfg.eval_episodes = *ov.eval_episodes;

    if (cfg.total_steps <= 0) throw ConfigError("config: total_steps must be > 0");
    if (cfg.eval_episodes <= 0) throw ConfigError("config: eval_episodes must be > 0");
    if (cfg.eval_workers <= 0) throw ConfigError("config: eval_workers must be > 0");
    if (cfg.replay_capacity == 0) throw ConfigError("config: replay_capacity must be >= 1");
    return cfg;
}

}  // namespace

RunConfig RunConfig::defaults() {
    RunConfig cfg;
    cfg.train_env.xy_min = 5.0;
    cfg.train_env.xy_max = 15.0;
    cfg.train_env.z_min = 2.0;
    cfg.train_env.z_max = 12.0;
    cfg.train_env.max_target_distance = 15.0;
    cfg.train_env.max_steps = 300;
    cfg.train_env.d_reached = 3.0;
    cfg.eval_env = cfg.train_env;
    cfg.eval_env.max_steps = 1000;
    cfg.eval_env.d_reached = 1.0;
    return cfg;
}

Scheme parse_scheme(const std::string& s) {
    if (s == "mf") return Scheme::kModelFree;
    if (s == "lb") return Scheme::kLearningBased;
    if (s == "fixed") return Scheme::kFixedPoles;
    throw ConfigError("config: unknown scheme '" + s + "' (expected mf, lb or fixed)");
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::kModelFree: return "mf";
        case Scheme::kLearningBased: return "lb";
        case Scheme::kFixedPoles: return "fixed";
    }
    return "?";
}

RunConfig load_run_config(const std::string& path, const CliOverrides& overrides) {
    if (path.empty()) return parse_config_json(json::object(), overrides);
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return run_config_from_json(ss.str(), overrides);
}

RunConfig run_config_from_json(const std::string& text, const CliOverrides& overrides) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be a JSON object");
    return parse_config_json(root, overrides);
}

std::string run_config_to_json(const RunConfig& cfg) {
    json root{
        {"scheme", scheme_name(cfg.scheme)},
        {"total_steps", cfg.total_steps},
        {"seed", cfg.seed},
        {"eval_episodes", cfg.eval_episodes},
        {"out_dir", cfg.out_dir},
        {"sac",
         {{"gamma", cfg.sac.gamma},
          {"alpha", cfg.sac.alpha},
          {"polyak_tau", cfg.sac.polyak_tau},
          {"batch_size", cfg.sac.batch_size},
          {"lr", cfg.sac.lr},
          {"updates_per_step", cfg.sac.updates_per_step},
          {"hidden_dims", cfg.hidden_dims},
          {"leaky_slope", cfg.leaky_slope}}},
        {"vehicle",
         {{"mass", cfg.vehicle.mass},
          {"gravity", cfg.vehicle.gravity},
          {"attitude_lag", cfg.vehicle.attitude_lag},
          {"wind_drag", cfg.vehicle.wind_drag},
          {"dt_control", cfg.vehicle.dt_control},
          {"physics_substeps", cfg.vehicle.physics_substeps}}},
        {"train_env", episode_to_json(cfg.train_env)},
        {"eval_env", episode_to_json(cfg.eval_env)},
        {"replay_capacity", cfg.replay_capacity},
        {"checkpoint_every", cfg.checkpoint_every},
        {"eval_workers", cfg.eval_workers},
        {"curriculum",
         {{"shrink2_fraction", cfg.curriculum.shrink2_fraction},
          {"shrink1_fraction", cfg.curriculum.shrink1_fraction}}},
    };
    json wind{{"extent_min", {cfg.wind.extent.min.x, cfg.wind.extent.min.y, cfg.wind.extent.min.z}},
              {"extent_max", {cfg.wind.extent.max.x, cfg.wind.extent.max.y, cfg.wind.extent.max.z}},
              {"spacing", {cfg.wind.spacing.x, cfg.wind.spacing.y, cfg.wind.spacing.z}}};
    if (cfg.wind.train_seed_set) wind["train"] = gust_to_json(cfg.wind.train);
    if (cfg.wind.eval_seed_set) wind["eval"] = gust_to_json(cfg.wind.eval);
    if (!cfg.wind.train_file.empty()) wind["train_file"] = cfg.wind.train_file;
    if (!cfg.wind.eval_file.empty()) wind["eval_file"] = cfg.wind.eval_file;
    root["wind"] = wind;
    return root.dump(2);
}

WindGenSpec load_windgen_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("windgen: cannot open '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("windgen: JSON parse error: ") + e.what());
    }
    check_keys(root, "windgen spec",
               {"base", "mode_count", "amplitude_range", "wavelength_range", "clip", "seed",
                "extent_min", "extent_max", "spacing"});
    WindGenSpec spec;
    bool seed_set = false;
    parse_gust(json{{"base", root.value("base", json::array({0.0, 0.0, 0.0}))},
                    {"mode_count", root.value("mode_count", 6)},
                    {"amplitude_range", root.value("amplitude_range", json::array({1.0, 4.0}))},
                    {"wavelength_range", root.value("wavelength_range", json::array({8.0, 40.0}))},
                    {"clip", root.value("clip", json::array({-5.0, 10.0}))},
                    {"seed", root.value("seed", 0)}},
               "windgen spec", spec.gust, seed_set);
    read_vec3(root, "extent_min", spec.extent.min);
    read_vec3(root, "extent_max", spec.extent.max);
    read_vec3(root, "spacing", spec.spacing);
    return spec;
}

namespace {

// Distinct derived streams keep training wind, evaluation wind and the
// training RNG independent under one run seed.
constexpr std::uint64_t kTrainWindStream = 0x77696e645f74ULL;  // "wind_t"
constexpr std::uint64_t kEvalWindStream = 0x77696e645f65ULL;   // "wind_e"

WindField make_field(const GustSpec& spec, bool seed_set, std::uint64_t run_seed,
                     std::uint64_t stream, const std::string& file, const WindConfig& wc) {
    if (!file.empty()) return load_field(file);
    GustSpec g = spec;
    if (!seed_set) g.seed = Rng::mix(run_seed, stream);
    return generate_procedural(g, wc.extent, wc.spacing);
}

}  // namespace

WindField make_train_field(const RunConfig& cfg) {
    return make_field(cfg.wind.train, cfg.wind.train_seed_set, cfg.seed, kTrainWindStream,
                      cfg.wind.train_file, cfg.wind);
}

WindField make_eval_field(const RunConfig& cfg) {
    return make_field(cfg.wind.eval, cfg.wind.eval_seed_set, cfg.seed, kEvalWindStream,
                      cfg.wind.eval_file, cfg.wind);
}

RunConfig resolve_wind_seeds(RunConfig cfg) {
    if (cfg.wind.train_file.empty() && !cfg.wind.train_seed_set) {
        cfg.wind.train.seed = Rng::mix(cfg.seed, kTrainWindStream);
        cfg.wind.train_seed_set = true;
    }
    if (cfg.wind.eval_file.empty() && !cfg.wind.eval_seed_set) {
        cfg.wind.eval.seed = Rng::mix(cfg.seed, kEvalWindStream);
        cfg.wind.eval_seed_set = true;
    }
    return cfg;
}

}  // namespace gustnav
