#include "skid/env.hpp"

#include <cmath>
#include <stdexcept>

#include "skid/errors.hpp"

namespace skid {

const char* to_string(TerminalCause c) {
    switch (c) {
        case TerminalCause::none: return "none";
        case TerminalCause::grip_success: return "grip_success";
        case TerminalCause::off_road: return "off_road";
        case TerminalCause::collision: return "collision";
        case TerminalCause::spin: return "spin";
        case TerminalCause::timeout: return "timeout";
        case TerminalCause::physics_fault: return "physics_fault";
    }
    return "unknown";
}

bool EnvConfig::valid() const {
    return scenario.valid() && vehicle.valid() && reward.valid() && d_cap > 0.0 &&
           timeout_steps > 0 && start_back_distance > 0.0 && vehicle_length > 0.0 &&
           vehicle_width > 0.0 && start_back_distance < scenario.plate_station;
}

nlohmann::json TrajectoryRecord::to_json() const {
    return {{"t", t},
            {"x", state.x},
            {"y", state.y},
            {"yaw", state.yaw},
            {"v_long", state.v_long},
            {"v_lat", state.v_lat},
            {"beta_deg", rad2deg(beta)},
            {"delta_deg", rad2deg(state.delta)},
            {"pedal", action[0]},
            {"steer_rate_cmd", action[1]},
            {"reward", reward},
            {"reward_components",
             {{"safe", components.safe},
              {"prog", components.prog},
              {"aux", components.aux},
              {"term", components.term}}},
            {"terminal_cause", to_string(cause)}};
}

Environment::Environment(EnvConfig cfg)
    : cfg_(std::move(cfg)), path_({{0.0, 0.0}, {1.0, 0.0}}) {
    if (!cfg_.valid()) throw ConfigError("invalid environment configuration");
}

Observation Environment::reset(Rng& scenario_rng) {
    return reset(sample_scenario(cfg_.scenario, scenario_rng));
}

Observation Environment::reset(const Scenario& scenario) {
    scenario_ = scenario;
    path_ = scenario_.original_path();
    state_ = VehicleState{};
    state_.x = scenario_.plate.trigger_x - cfg_.start_back_distance;
    state_.y = scenario_.lane_center(scenario_.entry_lane);
    state_.v_long = scenario_.entry_speed;
    plate_state_ = KickPlateState{};
    cause_ = TerminalCause::none;
    step_count_ = 0;
    grip_counter_ = 0;
    return_ = 0.0;
    started_ = true;
    trajectory_.clear();
    return observe();
}

Observation Environment::observe() const {
    return make_observation(state_, scenario_, path_, cfg_.d_cap, cfg_.vehicle.v_floor);
}

TerminalCause Environment::check_termination(double beta) {
    const OrientedBox footprint{{state_.x, state_.y}, 0.5 * cfg_.vehicle_length,
                                0.5 * cfg_.vehicle_width, state_.yaw};
    for (const auto& o : scenario_.obstacles) {
        if (intersects(footprint, scenario_.obstacle_box(o))) return TerminalCause::collision;
    }
    for (const Vec2& c : footprint.corners()) {
        if (c.y < 0.0 || c.y > scenario_.road_width()) return TerminalCause::off_road;
    }
    if (std::abs(beta) > cfg_.reward.spin_beta_threshold) return TerminalCause::spin;

    // The grip counter only arms once the plate has fired; the approach
    // phase is trivially below the threshold and must not end the episode.
    if (plate_state_.fired) {
        if (std::abs(beta) < cfg_.reward.grip_beta_threshold) {
            ++grip_counter_;
        } else {
            grip_counter_ = 0;
        }
        if (grip_counter_ >= cfg_.reward.grip_hold_steps) return TerminalCause::grip_success;
    }
    if (step_count_ >= cfg_.timeout_steps) return TerminalCause::timeout;
    return TerminalCause::none;
}

StepOutcome Environment::step(const std::array<double, kActionDim>& action) {
    if (!started_) throw std::logic_error("Environment::step before reset");
    if (done()) throw std::logic_error("Environment::step after terminal");

    const double pedal = std::clamp(action[0], -1.0, 1.0);
    const double steer_rate_cmd = std::clamp(action[1], -1.0, 1.0);

    const VehicleState prev = state_;
    bool faulted = false;
    try {
        state_ = step_dynamics(prev, pedal, steer_rate_cmd, scenario_.plate, plate_state_,
                               cfg_.vehicle);
    } catch (const PhysicsFault&) {
        faulted = true;
        state_ = prev;  // keep the last finite state for the log
    }
    ++step_count_;

    StepOutcome out;
    const double beta = side_slip(state_, cfg_.vehicle.v_floor);

    if (faulted) {
        cause_ = TerminalCause::physics_fault;
        out.obs = observe();
        out.info.components.term = cfg_.reward.terminal_penalty;
    } else {
        out.obs = observe();
        cause_ = check_termination(beta);

        out.info.components.safe = shaped_reward(out.obs.min_surround(), cfg_.reward.req_safe_dist);
        out.info.components.prog =
            frenet_progress({prev.x, prev.y}, {state_.x, state_.y}, path_);
        const double steer_rate = std::abs(steer_rate_cmd) * cfg_.vehicle.steer_rate_max;
        const double accel_mag = std::hypot(state_.a_long, state_.a_lat);
        out.info.components.aux =
            aux_reward(out.obs.cross_track, beta, steer_rate, accel_mag, cfg_.reward);
        if (cause_ == TerminalCause::grip_success) {
            out.info.components.term = cfg_.reward.terminal_bonus;
        } else if (cause_ == TerminalCause::collision || cause_ == TerminalCause::off_road ||
                   cause_ == TerminalCause::spin) {
            out.info.components.term = cfg_.reward.terminal_penalty;
        }
    }

    out.reward = out.info.components.total(cfg_.reward);
    out.done = cause_ != TerminalCause::none;
    out.info.min_surround = out.obs.min_surround();
    out.info.cause = cause_;
    out.info.grip_counter = grip_counter_;
    out.info.plate_fired = plate_state_.fired;
    return_ += out.reward;

    if (recording_) {
        TrajectoryRecord rec;
        rec.t = step_count_;
        rec.state = state_;
        rec.beta = beta;
        rec.action = {pedal, steer_rate_cmd};
        rec.reward = out.reward;
        rec.components = out.info.components;
        rec.cause = cause_;
        trajectory_.push_back(rec);
    }
    return out;
}

nlohmann::json Environment::episode_header() const {
    return {{"type", "header"}, {"scenario", scenario_.to_json()}};
}

}  // namespace skid
