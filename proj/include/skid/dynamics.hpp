#pragma once

#include "skid/geometry.hpp"

namespace skid {

// Control runs at 20 Hz; the integrator subdivides each period internally.
constexpr double kControlPeriod = 0.05;
constexpr double kGravity = 9.80665;

// Magic-formula coefficients for one axle.
struct TireParams {
    double stiffness_b = 10.0;  // B
    double shape_c = 1.9;       // C
    double peak_d = 0.0;        // D, newtons; scales with mu * Fz
    double curvature_e = 0.97;  // E

    bool valid() const { return stiffness_b > 0.0 && shape_c > 0.0 && peak_d >= 0.0; }
};

// F = D * sin(C * arctan(B*a - E*(B*a - arctan(B*a)))). Odd in the slip
// angle and bounded by |F| <= D.
double pacejka_lateral_force(double slip_angle, const TireParams& p);

struct VehicleParams {
    double mass = 1500.0;           // kg
    double yaw_inertia = 2500.0;    // kg m^2
    double dist_cg_front = 1.2;     // CG to front axle, m
    double dist_cg_rear = 1.6;      // CG to rear axle, m
    double mu_nominal = 1.0;
    double mu_scale = 0.5;          // benchmark runs on a half-friction surface
    double drive_force_max = 6000.0;   // N, rear axle
    double brake_force_max = 12000.0;  // N, total, split 60/40 front/rear
    double delta_max = deg2rad(37.0);
    double steer_rate_max = deg2rad(700.0);  // rad/s at full command
    int substeps = 50;
    double v_floor = 0.5;  // m/s, floors denominators near standstill
    TireParams front_tires;
    TireParams rear_tires;

    double wheelbase() const { return dist_cg_front + dist_cg_rear; }
    double mu_eff() const { return mu_nominal * mu_scale; }
    double front_axle_load() const { return mass * kGravity * dist_cg_rear / wheelbase(); }
    double rear_axle_load() const { return mass * kGravity * dist_cg_front / wheelbase(); }

    // Mid-size sedan with axle peak forces derived from the static loads.
    static VehicleParams sedan();

    bool valid() const;
};

// Full physical state of the ego vehicle.
//
// Conventions: world x east (along the road), y north (left of travel at
// zero yaw), yaw counterclockwise. Body-frame lateral velocity and slip are
// positive to the left. Steering angle `delta` and the steering-rate action
// are positive CLOCKWISE (steer right), the sign drivers' commands use in
// this codebase; the tire equations flip it internally.
struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;
    double v_long = 0.0;
    double v_lat = 0.0;
    double yaw_rate = 0.0;
    double delta = 0.0;
    double a_long = 0.0;  // mean body-frame acceleration over the last step
    double a_lat = 0.0;

    bool finite() const;
};

// Lateral pulse on the rear axle. Positive force pushes the rear to the
// left (world north at zero yaw), which swings the nose right.
struct KickPlate {
    double trigger_x = 0.0;      // longitudinal station of the plate
    double lateral_force = 0.0;  // N, signed
    double duration = 0.1;       // s
};

// Per-episode latch: the pulse fires once, when the rear axle first crosses
// trigger_x, and stays active for `duration` seconds.
struct KickPlateState {
    bool fired = false;
    double time_remaining = 0.0;

    bool active() const { return time_remaining > 0.0; }
};

double side_slip(const VehicleState& s, double v_floor);

// Advances one control period with `substeps` RK4 steps. Steering ramps
// linearly toward clamp(delta + cmd * steer_rate_max * dt, +-delta_max).
// Returned a_long/a_lat are the mean specific forces over the period.
// Throws PhysicsFault if the state leaves the finite range.
VehicleState step_dynamics(const VehicleState& s, double pedal, double steer_rate_cmd,
                           const KickPlate& plate, KickPlateState& plate_state,
                           const VehicleParams& params, double dt = kControlPeriod);

}  // namespace skid
