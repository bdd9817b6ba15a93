#include "skid/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "skid/errors.hpp"

namespace skid {

nlohmann::json SuccessReport::to_json() const {
    return {{"n_episodes", n_episodes},
            {"successes", successes},
            {"failures", failures},
            {"success_rate", success_rate},
            {"unavoidable_collisions", unavoidable_collisions},
            {"adjusted_success_rate", adjusted_success_rate},
            {"mean_return", mean_return},
            {"mean_length", mean_length},
            {"config_hash", config_hash}};
}

std::string SuccessReport::table() const {
    std::ostringstream out;
    out << "episodes            " << n_episodes << "\n";
    out << "successes           " << successes << "\n";
    for (const auto& [cause, count] : failures) {
        out << "fail/" << cause << std::string(std::max<int>(1, 15 - static_cast<int>(cause.size())), ' ')
            << count << "\n";
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "success_rate        %.1f%%\n", 100.0 * success_rate);
    out << buf;
    out << "unavoidable         " << unavoidable_collisions << "\n";
    std::snprintf(buf, sizeof(buf), "adjusted_rate       %.1f%%\n", 100.0 * adjusted_success_rate);
    out << buf;
    std::snprintf(buf, sizeof(buf), "mean_return         %.2f\n", mean_return);
    out << buf;
    std::snprintf(buf, sizeof(buf), "mean_length         %.1f\n", mean_length);
    out << buf;
    return out.str();
}

bool unavoidable_at_plate(const VehicleState& s, const Scenario& scene, const EnvConfig& cfg) {
    // Lateral acceleration limit on the reduced-friction surface, and a
    // fixed response delay covering the steering sweep and force build-up.
    const double a_lat_max = cfg.vehicle.mu_eff() * kGravity;
    const double response_delay = 0.25;
    const double speed = std::max(s.v_long, 1.0);

    const auto blocking_station = [&](int lane) {
        double nearest = kNoHit;
        for (const auto& o : scene.obstacles) {
            if (o.lane != lane) continue;
            const double near_face = o.station - 0.5 * o.length;
            if (near_face > s.x - cfg.vehicle_length && near_face < nearest) nearest = near_face;
        }
        return nearest;
    };

    const int ego_lane =
        std::clamp(static_cast<int>(std::floor(s.y / scene.lane_width)), 0, scene.lane_count - 1);
    const double ego_block = blocking_station(ego_lane);
    if (ego_block == kNoHit) return false;  // staying put is always an option

    // The maneuver must complete before reaching the obstacle in the
    // current lane.
    const double time_available = (ego_block - s.x - 0.5 * cfg.vehicle_length) / speed;
    const double t = std::max(0.0, time_available - response_delay);
    const double envelope = 0.5 * a_lat_max * t * t;

    for (int lane = 0; lane < scene.lane_count; ++lane) {
        if (lane == ego_lane) continue;
        if (blocking_station(lane) != kNoHit) continue;
        const double margin = 0.5 * (scene.lane_width - cfg.vehicle_width);
        const double need = std::max(0.0, std::abs(scene.lane_center(lane) - s.y) - margin);
        if (need <= envelope) return false;
    }
    return true;
}

template <class S>
SuccessReport evaluate(Learner<S>& learner, const EnvConfig& env_cfg, int n_episodes,
                       std::uint64_t seed, const std::string& trajectory_path) {
    SuccessReport report;
    report.n_episodes = n_episodes;
    std::ofstream traj;
    if (!trajectory_path.empty()) {
        traj.open(trajectory_path);
        if (!traj) throw IoError("cannot open trajectory log: " + trajectory_path);
    }

    Environment env(env_cfg);
    double return_sum = 0.0;
    double length_sum = 0.0;
    for (int ep = 0; ep < n_episodes; ++ep) {
        Rng scenario_rng = derive_rng(seed, "eval/scenario", static_cast<std::uint64_t>(ep));
        Observation obs = env.reset(scenario_rng);
        env.set_recording(traj.is_open());
        bool was_fired = false;
        bool unavoidable = false;
        while (!env.done()) {
            const auto action = learner.act(obs.flatten(), /*deterministic=*/true);
            const StepOutcome out = env.step(action);
            if (!was_fired && out.info.plate_fired) {
                was_fired = true;
                unavoidable = unavoidable_at_plate(env.state(), env.scenario(), env_cfg);
            }
            obs = out.obs;
        }
        return_sum += env.episode_return();
        length_sum += env.steps();
        if (env.cause() == TerminalCause::grip_success) {
            ++report.successes;
        } else {
            ++report.failures[to_string(env.cause())];
            if (env.cause() == TerminalCause::collision && unavoidable) {
                ++report.unavoidable_collisions;
            }
        }
        if (traj.is_open()) {
            nlohmann::json header = env.episode_header();
            header["episode"] = ep;
            traj << header.dump() << "\n";
            for (const auto& rec : env.trajectory()) traj << rec.to_json().dump() << "\n";
        }
    }
    report.success_rate = static_cast<double>(report.successes) / std::max(1, n_episodes);
    const int considered = n_episodes - report.unavoidable_collisions;
    report.adjusted_success_rate =
        considered > 0 ? static_cast<double>(report.successes) / considered : 0.0;
    report.mean_return = return_sum / std::max(1, n_episodes);
    report.mean_length = length_sum / std::max(1, n_episodes);
    return report;
}

template SuccessReport evaluate<float>(Learner<float>&, const EnvConfig&, int, std::uint64_t,
                                       const std::string&);
template SuccessReport evaluate<double>(Learner<double>&, const EnvConfig&, int, std::uint64_t,
                                        const std::string&);

}  // namespace skid
