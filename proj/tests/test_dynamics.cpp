#include <doctest.h>

#include <cmath>

#include "skid/dynamics.hpp"
#include "skid/errors.hpp"
#include "skid/rng.hpp"

using namespace skid;

namespace {

KickPlate no_plate() { return KickPlate{1e18, 0.0, 0.1}; }

VehicleState cruise_state(double speed = 19.44) {
    VehicleState s;
    s.v_long = speed;
    return s;
}

}  // namespace

TEST_CASE("pacejka is zero at zero slip") {
    TireParams p{10.0, 1.9, 5000.0, 0.97};
    CHECK(pacejka_lateral_force(0.0, p) == 0.0);
}

TEST_CASE("pacejka is an odd function") {
    TireParams p{10.0, 1.9, 5000.0, 0.97};
    CHECK(pacejka_lateral_force(-0.1, p) == doctest::Approx(-pacejka_lateral_force(0.1, p)).epsilon(1e-15));
    // Value frozen from a high-precision evaluation of the closed form.
    CHECK(pacejka_lateral_force(0.1, p) == doctest::Approx(4779.2105154207061).epsilon(1e-12));
}

TEST_CASE("pacejka closed-form reference value") {
    // B=10, C=1.9, D=5000, E=0.97, alpha=0.3, evaluated independently at
    // 40-digit precision.
    TireParams p{10.0, 1.9, 5000.0, 0.97};
    CHECK(pacejka_lateral_force(0.3, p) == doctest::Approx(4928.7620782038874).epsilon(1e-12));
}

TEST_CASE("pacejka is bounded by the peak") {
    TireParams p{10.0, 1.9, 5000.0, 0.97};
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const double a = rng.uniform(-3.0, 3.0);
        CHECK(std::abs(pacejka_lateral_force(a, p)) <= p.peak_d);
    }
}

TEST_CASE("pacejka saturates toward D*sin(C*pi/2)") {
    TireParams p{10.0, 1.9, 5000.0, 0.97};
    const double asymptote = p.peak_d * std::sin(p.shape_c * M_PI / 2.0);  // 782.17...
    for (double a : {0.8, 1.2, 2.0}) {
        CHECK(std::abs(pacejka_lateral_force(a, p)) ==
              doctest::Approx(std::abs(asymptote)).epsilon(0.05));
    }
}

TEST_CASE("straight coasting is an equilibrium") {
    const VehicleParams params = VehicleParams::sedan();
    VehicleState s = cruise_state();
    KickPlateState ps;
    for (int i = 0; i < 40; ++i) s = step_dynamics(s, 0.0, 0.0, no_plate(), ps, params);
    CHECK(s.v_long == doctest::Approx(19.44).epsilon(1e-12));  // no drag modeled
    CHECK(s.v_lat == 0.0);
    CHECK(s.yaw_rate == 0.0);
    CHECK(s.y == 0.0);
    CHECK(s.a_long == 0.0);
}

TEST_CASE("steering rate integrates and clamps at the wheel limit") {
    const VehicleParams params = VehicleParams::sedan();
    VehicleState s = cruise_state();
    s.delta = deg2rad(10.0);
    KickPlateState ps;
    // 10 + 700*0.05 = 45 exceeds the 37 degree cap.
    const VehicleState n = step_dynamics(s, 0.0, 1.0, no_plate(), ps, params);
    CHECK(n.delta == doctest::Approx(deg2rad(37.0)).epsilon(1e-12));
}

TEST_CASE("per-step steering change never exceeds rate * dt") {
    const VehicleParams params = VehicleParams::sedan();
    const double cap = params.steer_rate_max * kControlPeriod;
    VehicleState s = cruise_state();
    KickPlateState ps;
    Rng rng(5);
    for (int i = 0; i < 20000; ++i) {
        const double cmd = rng.uniform(-1.0, 1.0);
        const VehicleState n =
            step_dynamics(s, rng.uniform(-1.0, 1.0), cmd, no_plate(), ps, params);
        CHECK(std::abs(n.delta - s.delta) <= cap + 1e-12);
        s = n;
        if (!std::isfinite(s.v_long) || std::abs(s.v_long) > 100.0) s = cruise_state();
    }
}

TEST_CASE("steering update depends only on the previous angle and command") {
    const VehicleParams params = VehicleParams::sedan();
    KickPlateState ps1, ps2;
    VehicleState a = cruise_state(19.44);
    VehicleState b = cruise_state(12.0);
    b.v_lat = 1.5;
    b.yaw_rate = -0.4;
    a.delta = b.delta = deg2rad(-5.0);
    const VehicleState na = step_dynamics(a, 0.3, 0.42, no_plate(), ps1, params);
    const VehicleState nb = step_dynamics(b, -0.8, 0.42, no_plate(), ps2, params);
    CHECK(na.delta == nb.delta);
}

TEST_CASE("leftward kick swings the nose right") {
    // Tiny pulse so the linearized response is unambiguous: positive
    // (leftward) rear force must push v_lat up and yaw_rate down.
    const VehicleParams params = VehicleParams::sedan();
    KickPlate plate{5.0, 500.0, 0.1};
    KickPlateState ps;
    VehicleState s = cruise_state();
    s.x = 4.0 + params.dist_cg_rear;  // rear axle just before the plate
    VehicleState n = step_dynamics(s, 0.0, 0.0, plate, ps, params);
    CHECK(ps.fired);
    n = step_dynamics(n, 0.0, 0.0, plate, ps, params);
    CHECK(n.yaw_rate < 0.0);
    CHECK(n.v_lat > 0.0);
    CHECK(side_slip(n, params.v_floor) > 0.0);
}

TEST_CASE("kick plate fires exactly once") {
    const VehicleParams params = VehicleParams::sedan();
    KickPlate plate{5.0, 8000.0, 0.1};
    KickPlateState ps;
    VehicleState s = cruise_state();
    s.x = 4.0 + params.dist_cg_rear;
    for (int i = 0; i < 30; ++i) s = step_dynamics(s, 0.0, 0.0, plate, ps, params);
    CHECK(ps.fired);
    CHECK(ps.time_remaining == 0.0);
    const double v_lat_after = s.v_lat;
    // Driving on (already past trigger_x) must not re-fire.
    s = step_dynamics(s, 0.0, 0.0, plate, ps, params);
    CHECK(std::abs(s.v_lat) <= std::abs(v_lat_after) + 0.5);
}

TEST_CASE("integrator error shrinks at fourth order") {
    // Aggressive but smooth maneuver, no plate: full-throttle arc with a
    // steering sweep over one second.
    VehicleParams params = VehicleParams::sedan();
    const auto endpoint = [&](int substeps) {
        params.substeps = substeps;
        VehicleState s = cruise_state();
        KickPlateState ps;
        for (int i = 0; i < 20; ++i) {
            const double cmd = (i < 10) ? 0.5 : -0.3;
            s = step_dynamics(s, 0.4, cmd, no_plate(), ps, params);
        }
        return s;
    };
    const VehicleState c = endpoint(5);
    const VehicleState m = endpoint(10);
    const VehicleState f = endpoint(20);
    const double err_coarse = std::hypot(c.x - m.x, c.y - m.y) + std::abs(c.v_lat - m.v_lat);
    const double err_fine = std::hypot(m.x - f.x, m.y - f.y) + std::abs(m.v_lat - f.v_lat);
    REQUIRE(err_fine > 0.0);
    const double ratio = err_coarse / err_fine;
    // 2^4 = 16 within +-30%.
    CHECK(ratio > 16.0 * 0.7);
    CHECK(ratio < 16.0 * 1.3);
}

TEST_CASE("identical inputs give bit-identical states") {
    const VehicleParams params = VehicleParams::sedan();
    KickPlate plate{5.0, 9000.0, 0.1};
    auto run = [&]() {
        VehicleState s = cruise_state();
        KickPlateState ps;
        for (int i = 0; i < 50; ++i) s = step_dynamics(s, 0.15, 0.37, plate, ps, params);
        return s;
    };
    const VehicleState a = run();
    const VehicleState b = run();
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.yaw == b.yaw);
    CHECK(a.v_long == b.v_long);
    CHECK(a.v_lat == b.v_lat);
    CHECK(a.yaw_rate == b.yaw_rate);
    CHECK(a.delta == b.delta);
}

TEST_CASE("non-finite states raise a physics fault") {
    const VehicleParams params = VehicleParams::sedan();
    VehicleState s = cruise_state();
    s.x = std::numeric_limits<double>::max();
    s.v_long = 1e300;
    KickPlateState ps;
    CHECK_THROWS_AS(step_dynamics(s, 0.0, 0.0, no_plate(), ps, params), PhysicsFault);
}

TEST_CASE("braking transfers load off the rear lateral capacity") {
    // Friction-ellipse coupling: with a slide developing, full brake must
    // shrink the rear restoring force, so the slide grows faster.
    const VehicleParams params = VehicleParams::sedan();
    KickPlate plate{2.0, 12000.0, 0.1};
    auto max_slip = [&](double pedal) {
        VehicleState s = cruise_state();
        s.x = 1.0 + params.dist_cg_rear;
        KickPlateState ps;
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            s = step_dynamics(s, pedal, 0.0, plate, ps, params);
            worst = std::max(worst, std::abs(side_slip(s, params.v_floor)));
        }
        return worst;
    };
    CHECK(max_slip(-1.0) > max_slip(0.0));
}
