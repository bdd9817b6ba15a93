#pragma once

#include <vector>

#include <json.hpp>

#include "skid/dynamics.hpp"
#include "skid/geometry.hpp"
#include "skid/path.hpp"
#include "skid/rng.hpp"

namespace skid {

// Parked-vehicle-sized rectangle blocking one lane. `station` is the
// longitudinal center; the rectangle is centered laterally in its lane.
struct Obstacle {
    int lane = 0;
    double station = 0.0;
    double length = 4.5;
    double width = 1.8;
};

struct ScenarioConfig {
    int lane_count = 3;
    double lane_width = 3.5;
    double road_length = 500.0;
    double entry_speed = 19.44;  // 70 km/h
    double plate_station = 100.0;
    double plate_duration = 0.1;
    double plate_force_min = 10000.0;  // N, magnitude range of the kick
    double plate_force_max = 16000.0;
    double obstacle_length = 4.5;
    double obstacle_width = 1.8;
    double obstacle_min_ahead = 30.0;  // of the plate
    double obstacle_max_ahead = 70.0;

    bool valid() const;
};

// One randomized episode of the benchmark: entry lane, kick plate, and one
// or two obstacles ahead of the plate on distinct lanes.
struct Scenario {
    int lane_count = 3;
    double lane_width = 3.5;
    double road_length = 500.0;
    double entry_speed = 19.44;
    int entry_lane = 1;
    KickPlate plate;
    std::vector<Obstacle> obstacles;

    double road_width() const { return lane_count * lane_width; }
    double lane_center(int lane) const { return (lane + 0.5) * lane_width; }
    Path original_path() const {
        return Path::straight({0.0, lane_center(entry_lane)}, {road_length, lane_center(entry_lane)});
    }
    Aabb obstacle_box(const Obstacle& o) const;

    nlohmann::json to_json() const;
    static Scenario from_json(const nlohmann::json& j);
};

// Obstacle count uniform on {1, lane_count-1}, lanes without replacement,
// stations i.i.d. uniform ahead of the plate, kick sign uniform and
// magnitude uniform in the configured range.
Scenario sample_scenario(const ScenarioConfig& cfg, Rng& rng);

}  // namespace skid
