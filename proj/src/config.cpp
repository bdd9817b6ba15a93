#include "skid/config.hpp"

#include <fstream>
#include <set>

#include "skid/errors.hpp"

namespace skid {

using nlohmann::json;

nlohmann::json default_config_json() {
    return json{
        {"algorithm", "qcsac"},
        {"seed", 1},
        {"episodes", 2000},
        {"eval_episodes", 100},
        {"output_dir", "runs/out"},
        {"precision", "float"},
        {"ablation", {{"qnfd", true}, {"sddu", true}}},
        {"vehicle",
         {{"mass", 1500.0},
          {"yaw_inertia", 2500.0},
          {"dist_cg_front", 1.2},
          {"dist_cg_rear", 1.6},
          {"mu_nominal", 1.0},
          {"mu_scale", 0.5},
          {"drive_force_max", 6000.0},
          {"brake_force_max", 12000.0},
          {"delta_max_deg", 37.0},
          {"steer_rate_max_deg", 700.0},
          {"substeps", 50},
          {"v_floor", 0.5},
          {"tire_b", 10.0},
          {"tire_c", 1.9},
          {"tire_e", 0.97},
          {"tire_d_front", 0.0},
          {"tire_d_rear", 0.0}}},
        {"scenario",
         {{"lane_count", 3},
          {"lane_width", 3.5},
          {"road_length", 500.0},
          {"entry_speed", 19.44},
          {"plate_station", 100.0},
          {"plate_duration", 0.1},
          {"plate_force_min", 10000.0},
          {"plate_force_max", 16000.0},
          {"obstacle_length", 4.5},
          {"obstacle_width", 1.8},
          {"obstacle_min_ahead", 30.0},
          {"obstacle_max_ahead", 70.0}}},
        {"env",
         {{"d_cap", 100.0},
          {"timeout_steps", 400},
          {"start_back_distance", 30.0},
          {"vehicle_length", 4.5},
          {"vehicle_width", 1.8}}},
        {"reward",
         {{"lambda_safe", 0.8},
          {"lambda_prog", 0.2},
          {"lambda_aux", 0.2},
          {"req_cross_track", 3.5},
          {"req_accel", 2.943},
          {"req_beta_deg", 20.0},
          {"req_steer_rate_deg_s", 3000.0},
          {"req_safe_dist", 10.0},
          {"terminal_bonus", 50.0},
          {"terminal_penalty", -50.0},
          {"grip_beta_threshold_deg", 1.0},
          {"grip_hold_steps", 100},
          {"spin_beta_threshold_deg", 37.0}}},
        {"hyper",
         {{"gamma", 0.99},
          {"tau", 0.005},
          {"target_entropy", -2.0},
          {"batch_rl", 256},
          {"batch_bc", 256},
          {"gradient_steps_per_env_step", 1.0},
          {"bcsac_lambda", 1.0},
          {"c_max", 100.0},
          {"lr_q", 3e-4},
          {"lr_pi", 3e-4},
          {"lr_alpha", 3e-4},
          {"init_alpha", 1.0},
          {"warmup_transitions", 1000},
          {"random_action_steps", 1000},
          {"fer_sigma_divisor", 3.0},
          {"buffer_capacity", 1000000},
          {"hidden", {256, 256}}}},
        {"demo_policy",
         {{"countersteer_gain", 0.8},
          {"gain_error_std", 0.5},
          {"reaction_delay_steps", 6},
          {"action_noise_std", 0.25},
          {"panic_brake_prob", 0.4},
          {"steer_track_gain", 1.5},
          {"lane_keep_cross_gain", 0.05},
          {"lane_keep_heading_gain", 0.5},
          {"slide_enter_beta_deg", 3.0},
          {"slide_exit_beta_deg", 1.5},
          {"slide_exit_hold", 5}}},
        {"training",
         {{"checkpoint_every", 100},
          {"eval_every", 0},
          {"eval_episodes", 20},
          {"write_metrics", true},
          {"verbose", false}}}};
}

namespace {

// Recursively rejects keys that the reference config does not know, and
// merges overrides on top of the defaults.
void merge_validated(json& base, const json& overlay, const std::string& path) {
    if (!overlay.is_object()) {
        throw ConfigError("expected an object at " + (path.empty() ? "/" : path));
    }
    for (const auto& [key, value] : overlay.items()) {
        const std::string here = path + "/" + key;
        if (!base.contains(key)) throw ConfigError("unknown config key: " + here);
        json& slot = base[key];
        if (slot.is_object()) {
            merge_validated(slot, value, here);
        } else {
            // Scalar or array leaf: require a matching shape.
            const bool base_num = slot.is_number();
            const bool over_num = value.is_number();
            if (slot.is_array() != value.is_array() || slot.is_string() != value.is_string() ||
                slot.is_boolean() != value.is_boolean() || (base_num != over_num)) {
                throw ConfigError("type mismatch at " + here);
            }
            slot = value;
        }
    }
}

double num(const json& j, const char* section, const char* key) {
    const json& v = j.at(section).at(key);
    if (!v.is_number()) {
        throw ConfigError(std::string("expected a number at /") + section + "/" + key);
    }
    return v.get<double>();
}

int integer(const json& j, const char* section, const char* key) {
    const json& v = j.at(section).at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(std::string("expected an integer at /") + section + "/" + key);
    }
    return v.get<int>();
}

bool boolean(const json& j, const char* section, const char* key) {
    const json& v = j.at(section).at(key);
    if (!v.is_boolean()) {
        throw ConfigError(std::string("expected a boolean at /") + section + "/" + key);
    }
    return v.get<bool>();
}

}  // namespace

RunConfig parse_config(const json& user) {
    json merged = default_config_json();
    merge_validated(merged, user, "");

    RunConfig cfg;
    const std::string algo_name = merged.at("algorithm").get<std::string>();
    const auto algo = parse_algorithm(algo_name);
    if (!algo) throw ConfigError("unknown algorithm: " + algo_name + " (at /algorithm)");
    cfg.algorithm = *algo;
    cfg.seed = merged.at("seed").get<std::uint64_t>();
    cfg.episodes = merged.at("episodes").get<int>();
    cfg.eval_episodes = merged.at("eval_episodes").get<int>();
    cfg.output_dir = merged.at("output_dir").get<std::string>();
    cfg.precision = merged.at("precision").get<std::string>();
    if (cfg.precision != "float" && cfg.precision != "double") {
        throw ConfigError("precision must be \"float\" or \"double\" (at /precision)");
    }
    if (cfg.episodes < 0) throw ConfigError("episodes must be >= 0 (at /episodes)");

    cfg.ablation.use_qnfd = boolean(merged, "ablation", "qnfd");
    cfg.ablation.use_sddu = boolean(merged, "ablation", "sddu");

    VehicleParams& v = cfg.env.vehicle;
    v.mass = num(merged, "vehicle", "mass");
    v.yaw_inertia = num(merged, "vehicle", "yaw_inertia");
    v.dist_cg_front = num(merged, "vehicle", "dist_cg_front");
    v.dist_cg_rear = num(merged, "vehicle", "dist_cg_rear");
    v.mu_nominal = num(merged, "vehicle", "mu_nominal");
    v.mu_scale = num(merged, "vehicle", "mu_scale");
    v.drive_force_max = num(merged, "vehicle", "drive_force_max");
    v.brake_force_max = num(merged, "vehicle", "brake_force_max");
    v.delta_max = deg2rad(num(merged, "vehicle", "delta_max_deg"));
    v.steer_rate_max = deg2rad(num(merged, "vehicle", "steer_rate_max_deg"));
    v.substeps = integer(merged, "vehicle", "substeps");
    v.v_floor = num(merged, "vehicle", "v_floor");
    v.front_tires.stiffness_b = v.rear_tires.stiffness_b = num(merged, "vehicle", "tire_b");
    v.front_tires.shape_c = v.rear_tires.shape_c = num(merged, "vehicle", "tire_c");
    v.front_tires.curvature_e = v.rear_tires.curvature_e = num(merged, "vehicle", "tire_e");
    // Zero means "derive from the static axle load".
    const double df = num(merged, "vehicle", "tire_d_front");
    const double dr = num(merged, "vehicle", "tire_d_rear");
    v.front_tires.peak_d = df > 0.0 ? df : v.mu_eff() * v.front_axle_load();
    v.rear_tires.peak_d = dr > 0.0 ? dr : v.mu_eff() * v.rear_axle_load();
    if (!v.valid()) throw ConfigError("invalid vehicle parameters (at /vehicle)");

    ScenarioConfig& sc = cfg.env.scenario;
    sc.lane_count = integer(merged, "scenario", "lane_count");
    sc.lane_width = num(merged, "scenario", "lane_width");
    sc.road_length = num(merged, "scenario", "road_length");
    sc.entry_speed = num(merged, "scenario", "entry_speed");
    sc.plate_station = num(merged, "scenario", "plate_station");
    sc.plate_duration = num(merged, "scenario", "plate_duration");
    sc.plate_force_min = num(merged, "scenario", "plate_force_min");
    sc.plate_force_max = num(merged, "scenario", "plate_force_max");
    sc.obstacle_length = num(merged, "scenario", "obstacle_length");
    sc.obstacle_width = num(merged, "scenario", "obstacle_width");
    sc.obstacle_min_ahead = num(merged, "scenario", "obstacle_min_ahead");
    sc.obstacle_max_ahead = num(merged, "scenario", "obstacle_max_ahead");
    if (!sc.valid()) throw ConfigError("invalid scenario parameters (at /scenario)");

    cfg.env.d_cap = num(merged, "env", "d_cap");
    cfg.env.timeout_steps = integer(merged, "env", "timeout_steps");
    cfg.env.start_back_distance = num(merged, "env", "start_back_distance");
    cfg.env.vehicle_length = num(merged, "env", "vehicle_length");
    cfg.env.vehicle_width = num(merged, "env", "vehicle_width");

    RewardConfig& r = cfg.env.reward;
    r.lambda_safe = num(merged, "reward", "lambda_safe");
    r.lambda_prog = num(merged, "reward", "lambda_prog");
    r.lambda_aux = num(merged, "reward", "lambda_aux");
    r.req_cross_track = num(merged, "reward", "req_cross_track");
    r.req_accel = num(merged, "reward", "req_accel");
    r.req_beta = deg2rad(num(merged, "reward", "req_beta_deg"));
    r.req_steer_rate = deg2rad(num(merged, "reward", "req_steer_rate_deg_s"));
    r.req_safe_dist = num(merged, "reward", "req_safe_dist");
    r.terminal_bonus = num(merged, "reward", "terminal_bonus");
    r.terminal_penalty = num(merged, "reward", "terminal_penalty");
    r.grip_beta_threshold = deg2rad(num(merged, "reward", "grip_beta_threshold_deg"));
    r.grip_hold_steps = integer(merged, "reward", "grip_hold_steps");
    r.spin_beta_threshold = deg2rad(num(merged, "reward", "spin_beta_threshold_deg"));
    if (!r.valid()) throw ConfigError("invalid reward parameters (at /reward)");
    if (!cfg.env.valid()) throw ConfigError("invalid environment parameters (at /env)");

    HyperParams& h = cfg.hyper;
    h.gamma = num(merged, "hyper", "gamma");
    h.tau = num(merged, "hyper", "tau");
    h.target_entropy = num(merged, "hyper", "target_entropy");
    h.batch_rl = integer(merged, "hyper", "batch_rl");
    h.batch_bc = integer(merged, "hyper", "batch_bc");
    h.gradient_steps_per_env_step = num(merged, "hyper", "gradient_steps_per_env_step");
    h.bcsac_lambda = num(merged, "hyper", "bcsac_lambda");
    h.c_max = num(merged, "hyper", "c_max");
    h.lr_q = num(merged, "hyper", "lr_q");
    h.lr_pi = num(merged, "hyper", "lr_pi");
    h.lr_alpha = num(merged, "hyper", "lr_alpha");
    h.init_alpha = num(merged, "hyper", "init_alpha");
    h.warmup_transitions = integer(merged, "hyper", "warmup_transitions");
    h.random_action_steps = integer(merged, "hyper", "random_action_steps");
    h.fer_sigma_divisor = num(merged, "hyper", "fer_sigma_divisor");
    h.buffer_capacity = merged.at("hyper").at("buffer_capacity").get<std::size_t>();
    h.hidden.clear();
    for (const auto& w : merged.at("hyper").at("hidden")) {
        if (!w.is_number_integer() || w.get<int>() <= 0) {
            throw ConfigError("hidden widths must be positive integers (at /hyper/hidden)");
        }
        h.hidden.push_back(w.get<int>());
    }
    if (!h.valid()) throw ConfigError("invalid hyperparameters (at /hyper)");

    DemoPolicyConfig& d = cfg.demo_policy;
    d.countersteer_gain = num(merged, "demo_policy", "countersteer_gain");
    d.gain_error_std = num(merged, "demo_policy", "gain_error_std");
    d.reaction_delay_steps = integer(merged, "demo_policy", "reaction_delay_steps");
    d.action_noise_std = num(merged, "demo_policy", "action_noise_std");
    d.panic_brake_prob = num(merged, "demo_policy", "panic_brake_prob");
    d.steer_track_gain = num(merged, "demo_policy", "steer_track_gain");
    d.lane_keep_cross_gain = num(merged, "demo_policy", "lane_keep_cross_gain");
    d.lane_keep_heading_gain = num(merged, "demo_policy", "lane_keep_heading_gain");
    d.slide_enter_beta = deg2rad(num(merged, "demo_policy", "slide_enter_beta_deg"));
    d.slide_exit_beta = deg2rad(num(merged, "demo_policy", "slide_exit_beta_deg"));
    d.slide_exit_hold = integer(merged, "demo_policy", "slide_exit_hold");
    if (!d.valid()) throw ConfigError("invalid demonstrator parameters (at /demo_policy)");

    cfg.trainer.episodes = cfg.episodes;
    cfg.trainer.checkpoint_every = integer(merged, "training", "checkpoint_every");
    cfg.trainer.eval_every = integer(merged, "training", "eval_every");
    cfg.trainer.eval_episodes = integer(merged, "training", "eval_episodes");
    cfg.trainer.write_metrics = boolean(merged, "training", "write_metrics");
    cfg.trainer.verbose = boolean(merged, "training", "verbose");
    cfg.trainer.out_dir = cfg.output_dir;
    cfg.trainer.config_hash = hash_json(merged);
    return cfg;
}

nlohmann::json RunConfig::to_json() const {
    json j = default_config_json();
    j["algorithm"] = to_string(algorithm);
    j["seed"] = seed;
    j["episodes"] = episodes;
    j["eval_episodes"] = eval_episodes;
    j["output_dir"] = output_dir;
    j["precision"] = precision;
    j["ablation"]["qnfd"] = ablation.use_qnfd;
    j["ablation"]["sddu"] = ablation.use_sddu;
    auto& v = j["vehicle"];
    v["mass"] = env.vehicle.mass;
    v["yaw_inertia"] = env.vehicle.yaw_inertia;
    v["dist_cg_front"] = env.vehicle.dist_cg_front;
    v["dist_cg_rear"] = env.vehicle.dist_cg_rear;
    v["mu_nominal"] = env.vehicle.mu_nominal;
    v["mu_scale"] = env.vehicle.mu_scale;
    v["drive_force_max"] = env.vehicle.drive_force_max;
    v["brake_force_max"] = env.vehicle.brake_force_max;
    v["delta_max_deg"] = rad2deg(env.vehicle.delta_max);
    v["steer_rate_max_deg"] = rad2deg(env.vehicle.steer_rate_max);
    v["substeps"] = env.vehicle.substeps;
    v["v_floor"] = env.vehicle.v_floor;
    v["tire_b"] = env.vehicle.front_tires.stiffness_b;
    v["tire_c"] = env.vehicle.front_tires.shape_c;
    v["tire_e"] = env.vehicle.front_tires.curvature_e;
    v["tire_d_front"] = env.vehicle.front_tires.peak_d;
    v["tire_d_rear"] = env.vehicle.rear_tires.peak_d;
    auto& s = j["scenario"];
    s["lane_count"] = env.scenario.lane_count;
    s["lane_width"] = env.scenario.lane_width;
    s["road_length"] = env.scenario.road_length;
    s["entry_speed"] = env.scenario.entry_speed;
    s["plate_station"] = env.scenario.plate_station;
    s["plate_duration"] = env.scenario.plate_duration;
    s["plate_force_min"] = env.scenario.plate_force_min;
    s["plate_force_max"] = env.scenario.plate_force_max;
    s["obstacle_length"] = env.scenario.obstacle_length;
    s["obstacle_width"] = env.scenario.obstacle_width;
    s["obstacle_min_ahead"] = env.scenario.obstacle_min_ahead;
    s["obstacle_max_ahead"] = env.scenario.obstacle_max_ahead;
    auto& e = j["env"];
    e["d_cap"] = env.d_cap;
    e["timeout_steps"] = env.timeout_steps;
    e["start_back_distance"] = env.start_back_distance;
    e["vehicle_length"] = env.vehicle_length;
    e["vehicle_width"] = env.vehicle_width;
    auto& r = j["reward"];
    r["lambda_safe"] = env.reward.lambda_safe;
    r["lambda_prog"] = env.reward.lambda_prog;
    r["lambda_aux"] = env.reward.lambda_aux;
    r["req_cross_track"] = env.reward.req_cross_track;
    r["req_accel"] = env.reward.req_accel;
    r["req_beta_deg"] = rad2deg(env.reward.req_beta);
    r["req_steer_rate_deg_s"] = rad2deg(env.reward.req_steer_rate);
    r["req_safe_dist"] = env.reward.req_safe_dist;
    r["terminal_bonus"] = env.reward.terminal_bonus;
    r["terminal_penalty"] = env.reward.terminal_penalty;
    r["grip_beta_threshold_deg"] = rad2deg(env.reward.grip_beta_threshold);
    r["grip_hold_steps"] = env.reward.grip_hold_steps;
    r["spin_beta_threshold_deg"] = rad2deg(env.reward.spin_beta_threshold);
    auto& h = j["hyper"];
    h["gamma"] = hyper.gamma;
    h["tau"] = hyper.tau;
    h["target_entropy"] = hyper.target_entropy;
    h["batch_rl"] = hyper.batch_rl;
    h["batch_bc"] = hyper.batch_bc;
    h["gradient_steps_per_env_step"] = hyper.gradient_steps_per_env_step;
    h["bcsac_lambda"] = hyper.bcsac_lambda;
    h["c_max"] = hyper.c_max;
    h["lr_q"] = hyper.lr_q;
    h["lr_pi"] = hyper.lr_pi;
    h["lr_alpha"] = hyper.lr_alpha;
    h["init_alpha"] = hyper.init_alpha;
    h["warmup_transitions"] = hyper.warmup_transitions;
    h["random_action_steps"] = hyper.random_action_steps;
    h["fer_sigma_divisor"] = hyper.fer_sigma_divisor;
    h["buffer_capacity"] = hyper.buffer_capacity;
    h["hidden"] = hyper.hidden;
    auto& d = j["demo_policy"];
    d["countersteer_gain"] = demo_policy.countersteer_gain;
    d["gain_error_std"] = demo_policy.gain_error_std;
    d["reaction_delay_steps"] = demo_policy.reaction_delay_steps;
    d["action_noise_std"] = demo_policy.action_noise_std;
    d["panic_brake_prob"] = demo_policy.panic_brake_prob;
    d["steer_track_gain"] = demo_policy.steer_track_gain;
    d["lane_keep_cross_gain"] = demo_policy.lane_keep_cross_gain;
    d["lane_keep_heading_gain"] = demo_policy.lane_keep_heading_gain;
    d["slide_enter_beta_deg"] = rad2deg(demo_policy.slide_enter_beta);
    d["slide_exit_beta_deg"] = rad2deg(demo_policy.slide_exit_beta);
    d["slide_exit_hold"] = demo_policy.slide_exit_hold;
    auto& t = j["training"];
    t["checkpoint_every"] = trainer.checkpoint_every;
    t["eval_every"] = trainer.eval_every;
    t["eval_episodes"] = trainer.eval_episodes;
    t["write_metrics"] = trainer.write_metrics;
    t["verbose"] = trainer.verbose;
    return j;
}

std::uint64_t RunConfig::hash() const { return hash_json(to_json()); }

RunConfig default_config() { return parse_config(json::object()); }

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

std::uint64_t hash_json(const nlohmann::json& j) { return fnv1a64(j.dump()); }

}  // namespace skid
