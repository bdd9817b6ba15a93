#include "skid/demonstrator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace skid {

DemoPolicyConfig DemoPolicyConfig::ideal() {
    DemoPolicyConfig c;
    c.gain_error_std = 0.0;
    c.reaction_delay_steps = 0;
    c.action_noise_std = 0.0;
    c.panic_brake_prob = 0.0;
    return c;
}

ScriptedDriver::ScriptedDriver(DemoPolicyConfig cfg) : cfg_(cfg) {}

void ScriptedDriver::begin_episode(Rng& rng) {
    mode_ = Mode::lane_keep;
    gain_mult_ = std::max(0.1, 1.0 + cfg_.gain_error_std * rng.normal());
    panic_ = false;
    delay_left_ = 0;
    exit_counter_ = 0;
    held_action_ = {0.0, 0.0};
}

std::array<double, kActionDim> ScriptedDriver::act(const Observation& obs, Rng& rng) {
    const double beta = obs.beta;

    if (mode_ == Mode::lane_keep && std::abs(beta) > cfg_.slide_enter_beta) {
        // Slide event: the driver notices only after the reaction delay and
        // may panic onto the brake pedal.
        mode_ = cfg_.reaction_delay_steps > 0 ? Mode::reacting : Mode::countersteer;
        delay_left_ = cfg_.reaction_delay_steps;
        panic_ = rng.bernoulli(cfg_.panic_brake_prob);
        exit_counter_ = 0;
    }

    std::array<double, kActionDim> action{0.0, 0.0};
    switch (mode_) {
        case Mode::lane_keep: {
            // Steering is clockwise-positive: drift to the left (positive
            // cross-track) steers right, back toward the centerline.
            const double delta_target = cfg_.lane_keep_cross_gain * obs.cross_track +
                                        cfg_.lane_keep_heading_gain * obs.heading_err;
            const double cmd = cfg_.steer_track_gain * (delta_target - obs.delta);
            action = {0.0, std::clamp(cmd, -1.0, 1.0)};
            held_action_ = action;
            break;
        }
        case Mode::reacting: {
            action = held_action_;
            if (--delay_left_ <= 0) mode_ = Mode::countersteer;
            break;
        }
        case Mode::countersteer: {
            // Proportional counter-steer: the target angle opposes the slip,
            // so the initial rate command is opposite in sign to beta. The
            // lane-keeping term stays blended in so the recovery also aims
            // back down the road.
            const double delta_target = -cfg_.countersteer_gain * gain_mult_ * beta +
                                        cfg_.lane_keep_cross_gain * obs.cross_track +
                                        cfg_.lane_keep_heading_gain * obs.heading_err;
            double cmd = cfg_.steer_track_gain * (delta_target - obs.delta);
            if (cfg_.action_noise_std > 0.0) cmd += cfg_.action_noise_std * rng.normal();
            action = {panic_ ? -1.0 : 0.0, std::clamp(cmd, -1.0, 1.0)};

            if (std::abs(beta) < cfg_.slide_exit_beta) {
                if (++exit_counter_ >= cfg_.slide_exit_hold) {
                    mode_ = Mode::lane_keep;
                    panic_ = false;
                }
            } else {
                exit_counter_ = 0;
            }
            break;
        }
    }
    return action;
}

namespace {

template <class ActFn>
GenerationStats run_episodes(Environment& env, int n_episodes, Rng& scenario_rng, ActFn&& act,
                             DemoDataset& out, const std::function<void(Rng&)>& on_begin,
                             Rng& policy_rng) {
    GenerationStats stats;
    for (int ep = 0; ep < n_episodes; ++ep) {
        Observation obs = env.reset(scenario_rng);
        if (on_begin) on_begin(policy_rng);
        Episode episode;
        while (!env.done()) {
            const auto raw = obs.flatten();
            const std::array<double, kActionDim> action = act(obs, policy_rng);
            const StepOutcome step = env.step(action);
            Transition t;
            t.obs = raw;
            t.action = action;
            t.reward = step.reward;
            t.next_obs = step.obs.flatten();
            t.done = step.done;
            episode.push_back(t);
            obs = step.obs;
        }
        stats.total_steps += episode.size();
        if (env.cause() == TerminalCause::grip_success) ++stats.successes;
        out.add_episode(std::move(episode));
        ++stats.episodes;
    }
    stats.success_rate = static_cast<double>(stats.successes) / std::max(1, stats.episodes);
    stats.mean_episode_reward = out.mean_episode_reward();
    return stats;
}

}  // namespace

GenerationStats generate_demo_dataset(Environment& env, const DemoPolicyConfig& cfg,
                                      int n_episodes, std::uint64_t seed, DemoDataset& out) {
    ScriptedDriver driver(cfg);
    Rng scenario_rng = derive_rng(seed, "demo/scenario");
    Rng policy_rng = derive_rng(seed, "demo/policy");
    return run_episodes(
        env, n_episodes, scenario_rng,
        [&](const Observation& obs, Rng& rng) { return driver.act(obs, rng); }, out,
        [&](Rng& rng) { driver.begin_episode(rng); }, policy_rng);
}

GenerationStats generate_random_dataset(Environment& env, int n_episodes, std::uint64_t seed,
                                        DemoDataset& out) {
    Rng scenario_rng = derive_rng(seed, "demo/scenario");
    Rng policy_rng = derive_rng(seed, "demo/policy");
    return run_episodes(
        env, n_episodes, scenario_rng,
        [](const Observation&, Rng& rng) {
            return std::array<double, kActionDim>{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        },
        out, nullptr, policy_rng);
}

}  // namespace skid
