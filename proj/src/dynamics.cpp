#include "skid/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "skid/errors.hpp"

namespace skid {

double pacejka_lateral_force(double slip_angle, const TireParams& p) {
    const double ba = p.stiffness_b * slip_angle;
    return p.peak_d * std::sin(p.shape_c * std::atan(ba - p.curvature_e * (ba - std::atan(ba))));
}

VehicleParams VehicleParams::sedan() {
    VehicleParams v;
    v.front_tires.peak_d = v.mu_eff() * v.front_axle_load();
    v.rear_tires.peak_d = v.mu_eff() * v.rear_axle_load();
    return v;
}

bool VehicleParams::valid() const {
    return mass > 0.0 && yaw_inertia > 0.0 && wheelbase() > 0.0 && mu_scale > 0.0 &&
           mu_scale <= 1.0 && mu_nominal > 0.0 && drive_force_max >= 0.0 &&
           brake_force_max >= 0.0 && delta_max > 0.0 && steer_rate_max > 0.0 && substeps >= 1 &&
           v_floor > 0.0 && front_tires.valid() && rear_tires.valid();
}

bool VehicleState::finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(yaw) && std::isfinite(v_long) &&
           std::isfinite(v_lat) && std::isfinite(yaw_rate) && std::isfinite(delta) &&
           std::isfinite(a_long) && std::isfinite(a_lat);
}

double side_slip(const VehicleState& s, double v_floor) {
    return std::atan2(s.v_lat, std::max(s.v_long, v_floor));
}

namespace {

struct BodyState {
    double x, y, yaw, v_long, v_lat, yaw_rate;
};

struct Derivative {
    double dx, dy, dyaw, dv_long, dv_lat, dyaw_rate;
    double ax, ay;  // specific force, body frame
};

struct Inputs {
    double fx_front, fx_rear;  // wheel-frame longitudinal forces
    double delta_wheel;        // ISO front wheel angle (left positive)
    double kick_force;         // world-left positive, rear axle
};

Derivative derivative(const BodyState& s, const Inputs& in, const VehicleParams& p) {
    const double v_den = std::max(s.v_long, p.v_floor);
    const double alpha_f = std::atan2(s.v_lat + p.dist_cg_front * s.yaw_rate, v_den) - in.delta_wheel;
    const double alpha_r = std::atan2(s.v_lat - p.dist_cg_rear * s.yaw_rate, v_den);

    // Friction ellipse: longitudinal demand eats into the lateral peak.
    const double cap_f = p.mu_eff() * p.front_axle_load();
    const double cap_r = p.mu_eff() * p.rear_axle_load();
    const double fx_f = std::clamp(in.fx_front, -cap_f, cap_f);
    const double fx_r = std::clamp(in.fx_rear, -cap_r, cap_r);
    TireParams front = p.front_tires;
    TireParams rear = p.rear_tires;
    front.peak_d *= std::sqrt(std::max(0.0, 1.0 - (fx_f / cap_f) * (fx_f / cap_f)));
    rear.peak_d *= std::sqrt(std::max(0.0, 1.0 - (fx_r / cap_r) * (fx_r / cap_r)));

    const double fy_f_wheel = -pacejka_lateral_force(alpha_f, front);
    const double fy_r = -pacejka_lateral_force(alpha_r, rear) + in.kick_force;

    const double cos_d = std::cos(in.delta_wheel);
    const double sin_d = std::sin(in.delta_wheel);
    const double ffx = fx_f * cos_d - fy_f_wheel * sin_d;
    const double ffy = fx_f * sin_d + fy_f_wheel * cos_d;

    Derivative d;
    d.ax = (ffx + fx_r) / p.mass;
    d.ay = (ffy + fy_r) / p.mass;
    d.dv_long = d.ax + s.v_lat * s.yaw_rate;
    d.dv_lat = d.ay - s.v_long * s.yaw_rate;
    d.dyaw_rate = (p.dist_cg_front * ffy - p.dist_cg_rear * fy_r) / p.yaw_inertia;
    d.dx = s.v_long * std::cos(s.yaw) - s.v_lat * std::sin(s.yaw);
    d.dy = s.v_long * std::sin(s.yaw) + s.v_lat * std::cos(s.yaw);
    d.dyaw = s.yaw_rate;
    return d;
}

BodyState advance(const BodyState& s, const Derivative& d, double h) {
    return {s.x + h * d.dx,           s.y + h * d.dy,         s.yaw + h * d.dyaw,
            s.v_long + h * d.dv_long, s.v_lat + h * d.dv_lat, s.yaw_rate + h * d.dyaw_rate};
}

}  // namespace

VehicleState step_dynamics(const VehicleState& s, double pedal, double steer_rate_cmd,
                           const KickPlate& plate, KickPlateState& plate_state,
                           const VehicleParams& params, double dt) {
    pedal = std::clamp(pedal, -1.0, 1.0);
    steer_rate_cmd = std::clamp(steer_rate_cmd, -1.0, 1.0);

    // The pulse fires once, when the rear axle first reaches the plate.
    if (!plate_state.fired) {
        const double rear_x = s.x - params.dist_cg_rear * std::cos(s.yaw);
        if (rear_x >= plate.trigger_x) {
            plate_state.fired = true;
            plate_state.time_remaining = plate.duration;
        }
    }

    const double delta0 = s.delta;
    const double delta_rate = steer_rate_cmd * params.steer_rate_max;

    BodyState b{s.x, s.y, s.yaw, s.v_long, s.v_lat, s.yaw_rate};
    const int n = params.substeps;
    const double h = dt / n;
    double ax_sum = 0.0;
    double ay_sum = 0.0;
    double delta_final = delta0;

    for (int i = 0; i < n; ++i) {
        // Steering ramps within the period; clamping a monotone ramp keeps
        // the per-step cap |delta' - delta| <= steer_rate_max * dt exact.
        const double t0 = i * h;
        const double t_mid = t0 + 0.5 * h;
        const double t1 = t0 + h;
        const auto delta_at = [&](double t) {
            return std::clamp(delta0 + delta_rate * t, -params.delta_max, params.delta_max);
        };

        Inputs in;
        in.kick_force = plate_state.active() ? plate.lateral_force : 0.0;
        if (pedal >= 0.0) {
            in.fx_front = 0.0;
            in.fx_rear = pedal * params.drive_force_max;
        } else {
            // Brakes taper out below the velocity floor instead of pushing
            // the car backwards.
            const double scale = std::clamp(b.v_long / params.v_floor, 0.0, 1.0);
            const double total = -pedal * params.brake_force_max * scale;
            in.fx_front = -0.6 * total;
            in.fx_rear = -0.4 * total;
        }

        in.delta_wheel = -delta_at(t0);
        const Derivative k1 = derivative(b, in, params);
        in.delta_wheel = -delta_at(t_mid);
        const Derivative k2 = derivative(advance(b, k1, 0.5 * h), in, params);
        const Derivative k3 = derivative(advance(b, k2, 0.5 * h), in, params);
        in.delta_wheel = -delta_at(t1);
        const Derivative k4 = derivative(advance(b, k3, h), in, params);

        BodyState nb;
        nb.x = b.x + h / 6.0 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
        nb.y = b.y + h / 6.0 * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy);
        nb.yaw = b.yaw + h / 6.0 * (k1.dyaw + 2 * k2.dyaw + 2 * k3.dyaw + k4.dyaw);
        nb.v_long = b.v_long + h / 6.0 * (k1.dv_long + 2 * k2.dv_long + 2 * k3.dv_long + k4.dv_long);
        nb.v_lat = b.v_lat + h / 6.0 * (k1.dv_lat + 2 * k2.dv_lat + 2 * k3.dv_lat + k4.dv_lat);
        nb.yaw_rate =
            b.yaw_rate + h / 6.0 * (k1.dyaw_rate + 2 * k2.dyaw_rate + 2 * k3.dyaw_rate + k4.dyaw_rate);
        b = nb;

        ax_sum += (k1.ax + 2 * k2.ax + 2 * k3.ax + k4.ax) / 6.0;
        ay_sum += (k1.ay + 2 * k2.ay + 2 * k3.ay + k4.ay) / 6.0;
        delta_final = delta_at(t1);

        if (plate_state.active()) {
            plate_state.time_remaining = std::max(0.0, plate_state.time_remaining - h);
        }
    }

    VehicleState out;
    out.x = b.x;
    out.y = b.y;
    out.yaw = b.yaw;
    out.v_long = b.v_long;
    out.v_lat = b.v_lat;
    out.yaw_rate = b.yaw_rate;
    out.delta = delta_final;
    out.a_long = ax_sum / n;
    out.a_lat = ay_sum / n;

    if (!out.finite()) {
        throw PhysicsFault("vehicle state became non-finite during integration");
    }
    return out;
}

}  // namespace skid
