#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "skid/env.hpp"
#include "skid/learner.hpp"

namespace skid {

struct SuccessReport {
    int n_episodes = 0;
    int successes = 0;
    std::map<std::string, int> failures;  // cause -> count
    double success_rate = 0.0;
    int unavoidable_collisions = 0;
    double adjusted_success_rate = 0.0;  // excluding unavoidable collisions
    double mean_return = 0.0;
    double mean_length = 0.0;
    std::uint64_t config_hash = 0;

    nlohmann::json to_json() const;
    std::string table() const;
};

// Geometric test at the moment the plate fires: with the ego lane blocked,
// can any obstacle-free lane be reached within the lateral envelope the
// steering-rate cap and the friction limit allow before the blocking
// obstacle is reached?
bool unavoidable_at_plate(const VehicleState& s, const Scenario& scene, const EnvConfig& cfg);

// Deterministic-policy evaluation over freshly randomized episodes. Episode
// scenarios derive from `seed`, so identical seeds give identical reports.
// When `trajectory_path` is set, per-step logs are written as JSON lines.
template <class S>
SuccessReport evaluate(Learner<S>& learner, const EnvConfig& env_cfg, int n_episodes,
                       std::uint64_t seed, const std::string& trajectory_path = "");

}  // namespace skid
