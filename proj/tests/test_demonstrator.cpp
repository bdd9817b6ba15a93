#include <doctest.h>

#include <cmath>

#include "skid/config.hpp"
#include "skid/demonstrator.hpp"

using namespace skid;

namespace {

Observation obs_with(double beta, double cross = 0.0, double heading = 0.0, double delta = 0.0) {
    Observation o;
    o.beta = beta;
    o.v_long = 19.44;
    o.cross_track = cross;
    o.heading_err = heading;
    o.delta = delta;
    o.surround.fill(100.0);
    return o;
}

}  // namespace

TEST_CASE("on the centerline with zero slip the commands are near zero") {
    ScriptedDriver driver(default_config().demo_policy);
    Rng rng(1);
    driver.begin_episode(rng);
    const auto a = driver.act(obs_with(0.0), rng);
    CHECK(a[0] == 0.0);
    CHECK(std::abs(a[1]) < 0.05);
}

TEST_CASE("the reaction delay holds the pre-slide command") {
    DemoPolicyConfig cfg = default_config().demo_policy;
    cfg.reaction_delay_steps = 4;
    cfg.action_noise_std = 0.0;
    cfg.panic_brake_prob = 0.0;
    ScriptedDriver driver(cfg);
    Rng rng(2);
    driver.begin_episode(rng);

    // Establish a pre-slide command, then trip the slide detector.
    const auto pre = driver.act(obs_with(0.0, 0.3, 0.01), rng);
    const Observation sliding = obs_with(deg2rad(10.0), 0.3, 0.01);
    for (int i = 0; i < 4; ++i) {
        const auto held = driver.act(sliding, rng);
        CHECK(held[1] == pre[1]);
        CHECK(held[0] == pre[0]);
    }
    // After the delay the counter-steer engages.
    const auto reacting = driver.act(sliding, rng);
    CHECK(reacting[1] != pre[1]);
}

TEST_CASE("counter-steer command opposes the slip sign at onset") {
    DemoPolicyConfig cfg = default_config().demo_policy;
    cfg.reaction_delay_steps = 0;
    cfg.action_noise_std = 0.0;
    cfg.gain_error_std = 0.0;
    cfg.panic_brake_prob = 0.0;
    ScriptedDriver driver(cfg);
    Rng rng(3);

    driver.begin_episode(rng);
    const auto right_skid = driver.act(obs_with(deg2rad(8.0)), rng);
    CHECK(right_skid[1] < 0.0);

    driver.begin_episode(rng);
    const auto left_skid = driver.act(obs_with(deg2rad(-8.0)), rng);
    CHECK(left_skid[1] > 0.0);
}

TEST_CASE("panic braking latches for the slide when drawn") {
    DemoPolicyConfig cfg = default_config().demo_policy;
    cfg.panic_brake_prob = 1.0;
    cfg.reaction_delay_steps = 0;
    cfg.action_noise_std = 0.0;
    ScriptedDriver driver(cfg);
    Rng rng(4);
    driver.begin_episode(rng);
    const auto a = driver.act(obs_with(deg2rad(12.0)), rng);
    CHECK(a[0] == -1.0);
}

TEST_CASE("generated datasets store complete episodes with rewards") {
    RunConfig cfg = default_config();
    Environment env(cfg.env);
    DemoDataset ds;
    const auto stats = skid::generate_demo_dataset(env, cfg.demo_policy, 20, 123, ds);
    CHECK(stats.episodes == 20);
    CHECK(ds.episode_count() == 20);
    CHECK(stats.total_steps == ds.transition_count());
    for (std::size_t ep = 0; ep < ds.episode_count(); ++ep) {
        const Episode& e = ds.episode(ep);
        REQUIRE(!e.empty());
        CHECK(e.back().done);
        for (std::size_t i = 0; i + 1 < e.size(); ++i) CHECK(!e[i].done);
        for (const auto& t : e) {
            bool next_nonzero = false;
            for (double v : t.next_obs) next_nonzero = next_nonzero || v != 0.0;
            CHECK(next_nonzero);  // next states recorded
        }
    }
    CHECK(std::abs(ds.mean_episode_reward() - ds.recompute_mean_episode_reward()) < 1e-9);
}

TEST_CASE("the ideal configuration beats the immature default") {
    RunConfig cfg = default_config();
    for (std::uint64_t seed : {101ull, 202ull, 303ull}) {
        Environment env_a(cfg.env);
        DemoDataset da;
        const auto ideal = generate_demo_dataset(env_a, DemoPolicyConfig::ideal(), 150, seed, da);
        Environment env_b(cfg.env);
        DemoDataset db;
        const auto immature = generate_demo_dataset(env_b, cfg.demo_policy, 150, seed, db);
        CHECK(ideal.success_rate > immature.success_rate);
    }
}

TEST_CASE("the default immature driver lands near the human anchor") {
    RunConfig cfg = default_config();
    for (std::uint64_t seed : {11ull, 22ull}) {
        Environment env(cfg.env);
        DemoDataset ds;
        const auto stats = generate_demo_dataset(env, cfg.demo_policy, 200, seed, ds);
        CHECK(stats.success_rate >= 0.05);
        CHECK(stats.success_rate <= 0.25);
    }
}

TEST_CASE("random-action datasets have the same episode structure") {
    RunConfig cfg = default_config();
    Environment env(cfg.env);
    DemoDataset ds;
    const auto stats = generate_random_dataset(env, 10, 7, ds);
    CHECK(stats.episodes == 10);
    CHECK(ds.episode_count() == 10);
    for (std::size_t ep = 0; ep < ds.episode_count(); ++ep) {
        for (const auto& t : ds.episode(ep)) {
            CHECK(std::abs(t.action[0]) <= 1.0);
            CHECK(std::abs(t.action[1]) <= 1.0);
        }
    }
}
