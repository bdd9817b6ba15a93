#pragma once

#include "skid/env.hpp"
#include "skid/replay.hpp"

namespace skid {

// Imperfect human-like driver: proportional counter-steer applied late and
// with the wrong gain, plus occasional panic braking mid-slide.
struct DemoPolicyConfig {
    double countersteer_gain = 0.8;   // target steering per rad of slip
    double gain_error_std = 0.5;      // per-episode multiplicative gain error
    int reaction_delay_steps = 6;     // 0.3 s at 20 Hz
    double action_noise_std = 0.25;   // on the steer-rate command
    double panic_brake_prob = 0.4;    // per slide event
    double steer_track_gain = 1.5;    // rate command per rad of target error;
                                      // 1/(rate*dt) = 1.64 settles in one step
    double lane_keep_cross_gain = 0.05;
    double lane_keep_heading_gain = 0.5;
    double slide_enter_beta = deg2rad(3.0);
    double slide_exit_beta = deg2rad(1.5);
    int slide_exit_hold = 5;

    bool valid() const {
        return countersteer_gain > 0.0 && gain_error_std >= 0.0 && reaction_delay_steps >= 0 &&
               action_noise_std >= 0.0 && panic_brake_prob >= 0.0 && panic_brake_prob <= 1.0 &&
               steer_track_gain > 0.0 && slide_enter_beta > slide_exit_beta;
    }

    // No delay, no noise, no panic, calibrated gain.
    static DemoPolicyConfig ideal();
};

class ScriptedDriver {
  public:
    explicit ScriptedDriver(DemoPolicyConfig cfg);

    // Samples the per-episode gain error and clears latches.
    void begin_episode(Rng& rng);

    std::array<double, kActionDim> act(const Observation& obs, Rng& rng);

  private:
    enum class Mode { lane_keep, reacting, countersteer };

    DemoPolicyConfig cfg_;
    Mode mode_ = Mode::lane_keep;
    double gain_mult_ = 1.0;
    bool panic_ = false;
    int delay_left_ = 0;
    int exit_counter_ = 0;
    std::array<double, kActionDim> held_action_{};
};

struct GenerationStats {
    int episodes = 0;
    int successes = 0;
    double success_rate = 0.0;
    double mean_episode_reward = 0.0;
    std::size_t total_steps = 0;
};

// Runs full episodes and stores every transition, successes and failures
// alike. The environment is reset internally.
GenerationStats generate_demo_dataset(Environment& env, const DemoPolicyConfig& cfg,
                                      int n_episodes, std::uint64_t seed, DemoDataset& out);

// Same interface but uniformly random actions (adversarial dataset).
GenerationStats generate_random_dataset(Environment& env, int n_episodes, std::uint64_t seed,
                                        DemoDataset& out);

}  // namespace skid
