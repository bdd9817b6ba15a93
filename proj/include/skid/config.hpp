#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "skid/demonstrator.hpp"
#include "skid/env.hpp"
#include "skid/learner.hpp"
#include "skid/trainer.hpp"

namespace skid {

// Everything a run needs, assembled from the default config overlaid with
// an optional user file and CLI overrides. Angles appear in degrees in the
// JSON and are converted on load.
struct RunConfig {
    Algorithm algorithm = Algorithm::qcsac;
    std::uint64_t seed = 1;
    int episodes = 2000;
    int eval_episodes = 100;
    std::string output_dir = "runs/out";
    std::string precision = "float";  // "float" or "double"
    AblationFlags ablation;
    EnvConfig env;
    HyperParams hyper;
    DemoPolicyConfig demo_policy;
    TrainerConfig trainer;

    nlohmann::json to_json() const;
    std::uint64_t hash() const;
};

// The committed defaults: every published benchmark constant in one place.
nlohmann::json default_config_json();
RunConfig default_config();

// Parses and validates. Unknown keys, type errors, and invariant violations
// throw ConfigError with the offending JSON path.
RunConfig parse_config(const nlohmann::json& j);

RunConfig load_config_file(const std::string& path);

std::uint64_t hash_json(const nlohmann::json& j);

}  // namespace skid
