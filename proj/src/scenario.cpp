#include "skid/scenario.hpp"

#include <algorithm>

namespace skid {

bool ScenarioConfig::valid() const {
    return lane_count >= 2 && lane_width > 0.0 && road_length > 0.0 && entry_speed > 0.0 &&
           plate_station > 0.0 && plate_duration > 0.0 && plate_force_min >= 0.0 &&
           plate_force_max >= plate_force_min && obstacle_length > 0.0 && obstacle_width > 0.0 &&
           obstacle_min_ahead >= 0.0 && obstacle_max_ahead >= obstacle_min_ahead &&
           plate_station + obstacle_max_ahead + obstacle_length < road_length;
}

Aabb Scenario::obstacle_box(const Obstacle& o) const {
    const double cy = lane_center(o.lane);
    return Aabb{{o.station - 0.5 * o.length, cy - 0.5 * o.width},
                {o.station + 0.5 * o.length, cy + 0.5 * o.width}};
}

nlohmann::json Scenario::to_json() const {
    nlohmann::json obs = nlohmann::json::array();
    for (const auto& o : obstacles) {
        obs.push_back({{"lane", o.lane},
                       {"station", o.station},
                       {"length", o.length},
                       {"width", o.width}});
    }
    return {{"lane_count", lane_count},
            {"lane_width", lane_width},
            {"road_length", road_length},
            {"entry_speed", entry_speed},
            {"entry_lane", entry_lane},
            {"plate",
             {{"trigger_x", plate.trigger_x},
              {"lateral_force", plate.lateral_force},
              {"duration", plate.duration}}},
            {"obstacles", obs}};
}

Scenario Scenario::from_json(const nlohmann::json& j) {
    Scenario s;
    s.lane_count = j.at("lane_count").get<int>();
    s.lane_width = j.at("lane_width").get<double>();
    s.road_length = j.at("road_length").get<double>();
    s.entry_speed = j.at("entry_speed").get<double>();
    s.entry_lane = j.at("entry_lane").get<int>();
    const auto& p = j.at("plate");
    s.plate.trigger_x = p.at("trigger_x").get<double>();
    s.plate.lateral_force = p.at("lateral_force").get<double>();
    s.plate.duration = p.at("duration").get<double>();
    for (const auto& o : j.at("obstacles")) {
        s.obstacles.push_back(Obstacle{o.at("lane").get<int>(), o.at("station").get<double>(),
                                       o.at("length").get<double>(), o.at("width").get<double>()});
    }
    return s;
}

Scenario sample_scenario(const ScenarioConfig& cfg, Rng& rng) {
    Scenario s;
    s.lane_count = cfg.lane_count;
    s.lane_width = cfg.lane_width;
    s.road_length = cfg.road_length;
    s.entry_speed = cfg.entry_speed;
    s.entry_lane = static_cast<int>(rng.uniform_int(cfg.lane_count));

    s.plate.trigger_x = cfg.plate_station;
    s.plate.duration = cfg.plate_duration;
    const double magnitude = rng.uniform(cfg.plate_force_min, cfg.plate_force_max);
    s.plate.lateral_force = rng.bernoulli(0.5) ? magnitude : -magnitude;

    // One fewer obstacle than lanes at most, so a free lane always exists.
    const int max_obstacles = cfg.lane_count - 1;
    const int count = 1 + static_cast<int>(rng.uniform_int(max_obstacles));

    std::vector<int> lanes(cfg.lane_count);
    for (int i = 0; i < cfg.lane_count; ++i) lanes[i] = i;
    for (int i = 0; i < count; ++i) {  // partial Fisher-Yates
        const int j = i + static_cast<int>(rng.uniform_int(cfg.lane_count - i));
        std::swap(lanes[i], lanes[j]);
    }

    for (int i = 0; i < count; ++i) {
        Obstacle o;
        o.lane = lanes[i];
        o.station = cfg.plate_station + rng.uniform(cfg.obstacle_min_ahead, cfg.obstacle_max_ahead);
        o.length = cfg.obstacle_length;
        o.width = cfg.obstacle_width;
        s.obstacles.push_back(o);
    }
    return s;
}

}  // namespace skid
