#include <doctest.h>

#include <cmath>
#include <set>

#include "skid/config.hpp"
#include "skid/env.hpp"

using namespace skid;

namespace {

EnvConfig test_env_config() { return default_config().env; }

Scenario plain_scenario(double force = 0.0) {
    Scenario sc;
    sc.entry_lane = 1;
    sc.plate.trigger_x = 100.0;
    sc.plate.lateral_force = force;
    sc.plate.duration = 0.1;
    return sc;
}

}  // namespace

TEST_CASE("scenario sampling is deterministic in the seed") {
    const ScenarioConfig cfg;
    Rng a(42), b(42);
    for (int i = 0; i < 20; ++i) {
        CHECK(sample_scenario(cfg, a).to_json() == sample_scenario(cfg, b).to_json());
    }
}

TEST_CASE("sampled scenarios satisfy the placement constraints") {
    const ScenarioConfig cfg;
    Rng rng(7);
    int count_one = 0;
    for (int i = 0; i < 2000; ++i) {
        const Scenario s = sample_scenario(cfg, rng);
        REQUIRE(s.obstacles.size() >= 1);
        REQUIRE(s.obstacles.size() <= 2);
        if (s.obstacles.size() == 1) ++count_one;
        std::set<int> lanes;
        for (const auto& o : s.obstacles) {
            CHECK(o.lane >= 0);
            CHECK(o.lane < cfg.lane_count);
            CHECK(o.station >= cfg.plate_station + cfg.obstacle_min_ahead);
            CHECK(o.station <= cfg.plate_station + cfg.obstacle_max_ahead);
            lanes.insert(o.lane);
        }
        CHECK(lanes.size() == s.obstacles.size());  // distinct lanes
        CHECK(std::abs(s.plate.lateral_force) >= cfg.plate_force_min);
        CHECK(std::abs(s.plate.lateral_force) <= cfg.plate_force_max);
    }
    // Obstacle count is uniform on {1, 2}.
    CHECK(count_one > 850);
    CHECK(count_one < 1150);
}

TEST_CASE("corridor ray at 44.5 degrees") {
    Scenario sc = plain_scenario();
    VehicleState s;
    s.x = 70.0;
    s.y = 0.5 * sc.road_width();  // centered: 5.25 m to each boundary
    s.yaw = 0.0;
    const auto surround = build_surround(s, sc, 100.0);
    const double expected = 7.4902705205991337;  // 5.25 / sin(44.5 deg)
    CHECK(surround[0] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(surround[89] == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("obstacle face distance") {
    Scenario sc = plain_scenario();
    VehicleState s;
    s.x = 70.0;
    s.y = sc.lane_center(1);
    // Near face exactly 20 m ahead of the CG, in the ego lane.
    Obstacle o;
    o.lane = 1;
    o.station = s.x + 20.0 + 0.5 * o.length;
    sc.obstacles.push_back(o);
    const auto surround = build_surround(s, sc, 100.0);
    // The fan has rays at -0.5 and +0.5 degrees around dead ahead.
    const double expected = 20.0 / std::cos(deg2rad(0.5));
    CHECK(surround[44] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(surround[45] == doctest::Approx(expected).epsilon(1e-9));
    // The exact 0-degree ray of the primitive hits at 20.0 m.
    const double t = ray_segment_intersect({s.x, s.y}, {1.0, 0.0},
                                           sc.obstacle_box(o).edges()[3]);
    CHECK(t == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("near-parallel rays cap at d_cap on an empty road") {
    Scenario sc = plain_scenario();
    VehicleState s;
    s.x = 70.0;
    s.y = 0.5 * sc.road_width();
    const auto surround = build_surround(s, sc, 100.0);
    CHECK(surround[44] == 100.0);
    CHECK(surround[45] == 100.0);
}

TEST_CASE("minimum surround distance shrinks approaching an obstacle head-on") {
    Scenario sc = plain_scenario();
    Obstacle o;
    o.lane = 1;
    o.station = 160.0;
    sc.obstacles.push_back(o);
    VehicleState s;
    s.y = sc.lane_center(1);
    double prev = 1e18;
    for (double x : {100.0, 110.0, 120.0, 130.0, 140.0}) {
        s.x = x;
        Observation obs;
        obs.surround = build_surround(s, sc, 100.0);
        CHECK(obs.min_surround() < prev);
        prev = obs.min_surround();
    }
}

TEST_CASE("shaped reward hits its anchor points") {
    CHECK(shaped_reward(0.0, 3.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(shaped_reward(3.5, 3.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(shaped_reward(-3.5, 3.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(shaped_reward(7.0, 3.5) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("total reward composes the published weights") {
    RewardConfig cfg;
    RewardComponents c;
    c.safe = 0.5;
    c.prog = 1.0;
    c.aux = 0.2;
    c.term = 0.0;
    CHECK(c.total(cfg) == doctest::Approx(-0.16).epsilon(1e-12));
    RewardComponents zero;
    CHECK(zero.total(cfg) == 0.0);
}

TEST_CASE("frenet progress on a straight path") {
    const Path path = Path::straight({0.0, 5.25}, {500.0, 5.25});
    CHECK(frenet_progress({10.0, 5.25}, {11.0, 5.25}, path) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(frenet_progress({10.0, 5.25}, {10.0, 7.0}, path) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(frenet_progress({10.0, 5.0}, {9.5, 5.0}, path) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("pre-plate approach stays at zero slip and zero errors") {
    Environment env(test_env_config());
    Observation obs = env.reset(plain_scenario(12000.0));
    CHECK(obs.cross_track == 0.0);
    CHECK(obs.heading_err == 0.0);
    for (int i = 0; i < 25; ++i) {  // 30 m at 19.44 m/s is ~31 steps
        const StepOutcome out = env.step({0.0, 0.0});
        REQUIRE(!out.info.plate_fired);
        CHECK(out.obs.beta == 0.0);
        CHECK(out.obs.cross_track == 0.0);
        CHECK(out.obs.heading_err == 0.0);
    }
}

TEST_CASE("observation flattens to 98 finite values on every step") {
    Environment env(test_env_config());
    Rng rng(3);
    Observation obs = env.reset(rng);
    while (!env.done()) {
        const auto flat = obs.flatten();
        CHECK(flat.size() == 98);
        CHECK(obs.finite());
        obs = env.step({0.1, 0.05}).obs;
    }
}

TEST_CASE("tiny kick leads to grip success with the +50 bonus") {
    EnvConfig cfg = test_env_config();
    Environment env(cfg);
    env.reset(plain_scenario(100.0));  // barely perturbs the car
    StepOutcome last;
    while (!env.done()) last = env.step({0.0, 0.0});
    CHECK(env.cause() == TerminalCause::grip_success);
    CHECK(last.info.components.term == 50.0);
    CHECK(last.reward > 48.0);
    // Fired + 100 hold steps, well before timeout.
    CHECK(env.steps() < cfg.timeout_steps);
}

TEST_CASE("grip counter resets on an excursion above one degree") {
    Environment env(test_env_config());
    env.reset(plain_scenario(100.0));
    int fired_at = -1;
    int steps_done = 0;
    bool jerked = false;
    int counter_before_jerk = 0;
    while (!env.done()) {
        std::array<double, 2> action{0.0, 0.0};
        if (fired_at > 0 && steps_done == fired_at + 50 && !jerked) {
            jerked = true;
        }
        // Hold a hard steer for a few steps mid-window to push |beta| > 1 deg.
        if (jerked && steps_done < fired_at + 56) action[1] = 1.0;
        const StepOutcome out = env.step(action);
        ++steps_done;
        if (fired_at < 0 && out.info.plate_fired) fired_at = steps_done;
        if (jerked && steps_done == fired_at + 50) counter_before_jerk = out.info.grip_counter;
        if (jerked && steps_done == fired_at + 58) {
            CHECK(out.info.grip_counter < counter_before_jerk);
        }
    }
    // The episode still finishes (success or timeout), later than the
    // undisturbed 100-step window would have allowed.
    CHECK(env.steps() > fired_at + 100);
}

TEST_CASE("strong kick without control spins the car") {
    Environment env(test_env_config());
    env.reset(plain_scenario(30000.0));
    StepOutcome last;
    while (!env.done()) last = env.step({0.0, 0.0});
    CHECK(env.cause() == TerminalCause::spin);
    CHECK(last.info.components.term == -50.0);
}

TEST_CASE("driving off the road terminates with the penalty") {
    Environment env(test_env_config());
    env.reset(plain_scenario());
    StepOutcome last;
    while (!env.done()) last = env.step({0.0, -0.3});  // steady right steer
    CHECK(env.cause() == TerminalCause::off_road);
    CHECK(last.info.components.term == -50.0);
}

TEST_CASE("obstacle contact reports a collision") {
    Scenario sc = plain_scenario();
    Obstacle o;
    o.lane = 1;
    o.station = 90.0;  // before the plate so the approach hits it
    sc.obstacles.push_back(o);
    Environment env(test_env_config());
    env.reset(sc);
    while (!env.done()) env.step({0.0, 0.0});
    CHECK(env.cause() == TerminalCause::collision);
}

TEST_CASE("timeout ends the episode with zero terminal reward") {
    EnvConfig cfg = test_env_config();
    cfg.timeout_steps = 40;
    Environment env(cfg);
    env.reset(plain_scenario());  // no kick: beta stays 0 but never arms
    StepOutcome last;
    while (!env.done()) last = env.step({0.0, 0.0});
    CHECK(env.cause() == TerminalCause::timeout);
    CHECK(last.info.components.term == 0.0);
    CHECK(env.steps() == 40);
}

TEST_CASE("stepping a finished episode is a usage fault") {
    EnvConfig cfg = test_env_config();
    cfg.timeout_steps = 5;
    Environment env(cfg);
    env.reset(plain_scenario());
    while (!env.done()) env.step({0.0, 0.0});
    CHECK_THROWS_AS(env.step({0.0, 0.0}), std::logic_error);
}

TEST_CASE("per-step reward is bounded away from the terminal bonus") {
    Environment env(test_env_config());
    Rng rng(91);
    for (int ep = 0; ep < 5; ++ep) {
        env.reset(rng);
        Rng act(ep);
        while (!env.done()) {
            const double speed_before = std::abs(env.state().v_long) + 1.0;
            const StepOutcome out =
                env.step({act.uniform(-1.0, 1.0), act.uniform(-1.0, 1.0)});
            const double bound = 0.8 + 0.2 * (speed_before * kControlPeriod + 0.5) + 0.2;
            CHECK(std::abs(out.reward - out.info.components.term) <= bound);
        }
    }
}

TEST_CASE("identical seeds give identical trajectories") {
    auto run = [](std::uint64_t seed) {
        Environment env(test_env_config());
        env.set_recording(true);
        Rng scenario_rng(seed);
        env.reset(scenario_rng);
        Rng act(seed + 1);
        while (!env.done()) env.step({act.uniform(-1.0, 1.0), act.uniform(-1.0, 1.0)});
        nlohmann::json log = nlohmann::json::array();
        log.push_back(env.episode_header());
        for (const auto& r : env.trajectory()) log.push_back(r.to_json());
        return log.dump();
    };
    CHECK(run(123) == run(123));
    CHECK(run(123) != run(124));
}

TEST_CASE("exactly one termination cause is reported") {
    Environment env(test_env_config());
    Rng rng(17);
    for (int ep = 0; ep < 10; ++ep) {
        env.reset(rng);
        Rng act(ep * 7 + 1);
        int terminal_records = 0;
        while (!env.done()) {
            const StepOutcome out = env.step({act.uniform(-1.0, 1.0), act.uniform(-1.0, 1.0)});
            if (out.done) {
                ++terminal_records;
                CHECK(out.info.cause != TerminalCause::none);
            } else {
                CHECK(out.info.cause == TerminalCause::none);
            }
        }
        CHECK(terminal_records == 1);
    }
}
