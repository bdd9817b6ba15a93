#pragma once

#include <array>

#include "skid/dynamics.hpp"
#include "skid/path.hpp"
#include "skid/scenario.hpp"

namespace skid {

constexpr int kSurroundRays = 90;
constexpr int kObsDim = 8 + kSurroundRays;
constexpr int kActionDim = 2;

// Learner input: eight vehicle-state features plus ninety polar drivable
// distances. Values are physical units; normalization happens at batch
// assembly (see ObsScales).
struct Observation {
    double beta = 0.0;         // side slip angle, rad
    double v_long = 0.0;       // m/s
    double a_long = 0.0;       // m/s^2
    double a_lat = 0.0;        // m/s^2
    double cross_track = 0.0;  // m, left of the original path positive
    double heading_err = 0.0;  // rad
    double yaw_rate = 0.0;     // rad/s
    double delta = 0.0;        // rad, clockwise positive
    std::array<double, kSurroundRays> surround{};

    std::array<double, kObsDim> flatten() const;
    static Observation from_flat(const std::array<double, kObsDim>& v);

    bool finite() const;
    double min_surround() const;
};

// Fixed per-feature scales dividing raw values into roughly [-1, 1]:
// distances by the ray cap, angles by pi, speeds by 40 m/s, accelerations
// by 10 m/s^2, yaw rate by 2*pi.
struct ObsScales {
    double d_cap = 100.0;

    std::array<double, kObsDim> scales() const;
    void normalize(const std::array<double, kObsDim>& raw, double* out) const;
};

// Ray k (k = 0..89) leaves the CG at azimuth yaw + (-44.5 + k) degrees and
// returns the distance to the first obstacle edge or road boundary, capped
// at d_cap.
std::array<double, kSurroundRays> build_surround(const VehicleState& s, const Scenario& scene,
                                                 double d_cap);

Observation make_observation(const VehicleState& s, const Scenario& scene, const Path& path,
                             double d_cap, double v_floor);

}  // namespace skid
