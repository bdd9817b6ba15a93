#include "skid/observation.hpp"

#include <cmath>

namespace skid {

std::array<double, kObsDim> Observation::flatten() const {
    std::array<double, kObsDim> v;
    v[0] = beta;
    v[1] = v_long;
    v[2] = a_long;
    v[3] = a_lat;
    v[4] = cross_track;
    v[5] = heading_err;
    v[6] = yaw_rate;
    v[7] = delta;
    for (int i = 0; i < kSurroundRays; ++i) v[8 + i] = surround[i];
    return v;
}

Observation Observation::from_flat(const std::array<double, kObsDim>& v) {
    Observation o;
    o.beta = v[0];
    o.v_long = v[1];
    o.a_long = v[2];
    o.a_lat = v[3];
    o.cross_track = v[4];
    o.heading_err = v[5];
    o.yaw_rate = v[6];
    o.delta = v[7];
    for (int i = 0; i < kSurroundRays; ++i) o.surround[i] = v[8 + i];
    return o;
}

bool Observation::finite() const {
    for (double v : flatten()) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double Observation::min_surround() const {
    double m = surround[0];
    for (double v : surround) m = std::min(m, v);
    return m;
}

std::array<double, kObsDim> ObsScales::scales() const {
    std::array<double, kObsDim> s;
    s[0] = M_PI;         // beta
    s[1] = 40.0;         // v_long
    s[2] = 10.0;         // a_long
    s[3] = 10.0;         // a_lat
    s[4] = d_cap;        // cross-track error is a distance
    s[5] = M_PI;         // heading error
    s[6] = 2.0 * M_PI;   // yaw rate
    s[7] = M_PI;         // steering angle
    for (int i = 0; i < kSurroundRays; ++i) s[8 + i] = d_cap;
    return s;
}

void ObsScales::normalize(const std::array<double, kObsDim>& raw, double* out) const {
    const auto s = scales();
    for (int i = 0; i < kObsDim; ++i) out[i] = raw[i] / s[i];
}

std::array<double, kSurroundRays> build_surround(const VehicleState& s, const Scenario& scene,
                                                 double d_cap) {
    // Collect every blocking segment once per call: four road edges plus
    // four edges per obstacle.
    std::array<Segment, 4> road = Aabb{{0.0, 0.0}, {scene.road_length, scene.road_width()}}.edges();
    std::vector<Segment> segments(road.begin(), road.end());
    for (const auto& o : scene.obstacles) {
        const auto edges = scene.obstacle_box(o).edges();
        segments.insert(segments.end(), edges.begin(), edges.end());
    }

    std::array<double, kSurroundRays> out;
    const Vec2 origin{s.x, s.y};
    for (int k = 0; k < kSurroundRays; ++k) {
        const double azimuth = s.yaw + deg2rad(-44.5 + k);
        const Vec2 dir = unit_from_angle(azimuth);
        double best = d_cap;
        for (const Segment& seg : segments) {
            const double t = ray_segment_intersect(origin, dir, seg);
            if (t < best) best = t;
        }
        // The cap also floors degenerate zero hits so values stay in (0, d_cap].
        out[k] = std::max(best, 1e-9);
    }
    return out;
}

Observation make_observation(const VehicleState& s, const Scenario& scene, const Path& path,
                             double d_cap, double v_floor) {
    Observation o;
    o.beta = side_slip(s, v_floor);
    o.v_long = s.v_long;
    o.a_long = s.a_long;
    o.a_lat = s.a_lat;
    const auto proj = path.project({s.x, s.y});
    o.cross_track = proj.lateral;
    o.heading_err = wrap_angle(s.yaw - proj.heading);
    o.yaw_rate = s.yaw_rate;
    o.delta = s.delta;
    o.surround = build_surround(s, scene, d_cap);
    return o;
}

}  // namespace skid
