#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skid/observation.hpp"
#include "skid/reward.hpp"
#include "skid/scenario.hpp"

namespace skid {

enum class TerminalCause {
    none,
    grip_success,
    off_road,
    collision,
    spin,
    timeout,
    physics_fault,
};

const char* to_string(TerminalCause c);

struct StepInfo {
    RewardComponents components;
    double min_surround = 0.0;
    TerminalCause cause = TerminalCause::none;
    int grip_counter = 0;
    bool plate_fired = false;
};

struct StepOutcome {
    Observation obs;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

struct EnvConfig {
    ScenarioConfig scenario;
    VehicleParams vehicle = VehicleParams::sedan();
    RewardConfig reward;
    double d_cap = 100.0;
    int timeout_steps = 400;
    double start_back_distance = 30.0;  // spawn this far before the plate
    double vehicle_length = 4.5;
    double vehicle_width = 1.8;

    bool valid() const;
};

// One line of the trajectory log.
struct TrajectoryRecord {
    int t = 0;
    VehicleState state;
    double beta = 0.0;
    std::array<double, kActionDim> action{};
    double reward = 0.0;
    RewardComponents components;
    TerminalCause cause = TerminalCause::none;

    nlohmann::json to_json() const;
};

// The oversteer-control-and-collision-avoidance benchmark. Owns the vehicle
// state, the kick-plate latch, reward computation and termination logic.
// Single-threaded; run one instance per worker.
class Environment {
  public:
    explicit Environment(EnvConfig cfg);

    Observation reset(const Scenario& scenario);
    Observation reset(Rng& scenario_rng);

    // Advances one control period. Throws std::logic_error when called on a
    // finished episode; physics faults terminate the episode instead of
    // propagating.
    StepOutcome step(const std::array<double, kActionDim>& action);

    bool done() const { return cause_ != TerminalCause::none; }
    TerminalCause cause() const { return cause_; }
    int steps() const { return step_count_; }
    double episode_return() const { return return_; }
    const Scenario& scenario() const { return scenario_; }
    const VehicleState& state() const { return state_; }
    const EnvConfig& config() const { return cfg_; }
    bool plate_fired() const { return plate_state_.fired; }

    void set_recording(bool on) { recording_ = on; }
    const std::vector<TrajectoryRecord>& trajectory() const { return trajectory_; }
    nlohmann::json episode_header() const;

  private:
    Observation observe() const;
    TerminalCause check_termination(double beta);

    EnvConfig cfg_;
    Scenario scenario_;
    Path path_;
    VehicleState state_;
    KickPlateState plate_state_;
    TerminalCause cause_ = TerminalCause::none;
    int step_count_ = 0;
    int grip_counter_ = 0;
    double return_ = 0.0;
    bool started_ = false;
    bool recording_ = false;
    std::vector<TrajectoryRecord> trajectory_;
};

}  // namespace skid
