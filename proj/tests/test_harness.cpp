#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skid/config.hpp"
#include "skid/errors.hpp"
#include "skid/report.hpp"
#include "skid/trainer.hpp"

using namespace skid;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

// Policy with constant deterministic output, for behavioral floors.
template <class S>
void force_constant_policy(Learner<S>& learner, double pedal, double steer) {
    auto& p = learner.policy();
    for (auto& l : p.trunk.layers) {
        l.w.setZero();
        l.b.setZero();
    }
    p.mean_head.w.setZero();
    p.mean_head.b(0) = static_cast<S>(std::atanh(std::clamp(pedal, -0.999999, 0.999999)));
    p.mean_head.b(1) = static_cast<S>(std::atanh(std::clamp(steer, -0.999999, 0.999999)));
    p.logstd_head.w.setZero();
    p.logstd_head.b.setConstant(S(-5));
}

}  // namespace

TEST_CASE("the default configuration parses and validates") {
    const RunConfig cfg = default_config();
    CHECK(cfg.env.valid());
    CHECK(cfg.hyper.valid());
    CHECK(cfg.env.reward.lambda_safe == 0.8);
    CHECK(cfg.env.reward.req_accel == 2.943);
    CHECK(cfg.env.reward.req_cross_track == 3.5);
    CHECK(rad2deg(cfg.env.reward.req_beta) == doctest::Approx(20.0));
    CHECK(rad2deg(cfg.env.reward.req_steer_rate) == doctest::Approx(3000.0));
    CHECK(cfg.env.scenario.entry_speed == 19.44);
    CHECK(rad2deg(cfg.env.vehicle.steer_rate_max) == doctest::Approx(700.0));
    CHECK(rad2deg(cfg.env.vehicle.delta_max) == doctest::Approx(37.0));
}

TEST_CASE("unknown keys are rejected with their path") {
    nlohmann::json j = {{"vehicle", {{"masss", 1200.0}}}};
    try {
        parse_config(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/vehicle/masss") != std::string::npos);
    }
}

TEST_CASE("type mismatches are rejected") {
    CHECK_THROWS_AS(parse_config({{"episodes", "many"}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"hyper", {{"gamma", true}}}}), ConfigError);
}

TEST_CASE("invariant violations are rejected") {
    CHECK_THROWS_AS(parse_config({{"vehicle", {{"mass", -10.0}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"hyper", {{"gamma", 1.5}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"algorithm", "dqn"}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"precision", "half"}}), ConfigError);
}

TEST_CASE("overrides land in the parsed structures") {
    const RunConfig cfg = parse_config({{"algorithm", "bcsac"},
                                        {"seed", 77},
                                        {"scenario", {{"plate_force_min", 11000.0}}},
                                        {"hyper", {{"batch_rl", 32}}}});
    CHECK(cfg.algorithm == Algorithm::bcsac);
    CHECK(cfg.seed == 77);
    CHECK(cfg.env.scenario.plate_force_min == 11000.0);
    CHECK(cfg.hyper.batch_rl == 32);
}

TEST_CASE("the config hash tracks content") {
    const RunConfig a = default_config();
    RunConfig b = default_config();
    CHECK(a.hash() == b.hash());
    b.hyper.batch_rl = 64;
    CHECK(a.hash() != b.hash());
}

TEST_CASE("derived seeds separate components and indices") {
    CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
    CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
    CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
    CHECK(derive_seed(1, "a", 3) == derive_seed(1, "a", 3));
}

TEST_CASE("two same-seed training runs write identical metrics files") {
    RunConfig cfg = default_config();
    cfg.hyper.batch_rl = 8;
    cfg.hyper.batch_bc = 8;
    cfg.hyper.warmup_transitions = 32;
    cfg.hyper.random_action_steps = 16;
    cfg.hyper.hidden = {16, 16};

    DemoDataset demos;
    {
        Environment env(cfg.env);
        generate_demo_dataset(env, cfg.demo_policy, 3, 5, demos);
    }

    auto run = [&](const std::string& dir) {
        TrainerConfig tcfg = cfg.trainer;
        tcfg.out_dir = dir;
        tcfg.checkpoint_every = 0;
        Trainer<float> trainer(cfg.env, Algorithm::qcsac, cfg.hyper, cfg.ablation, tcfg, demos,
                               42);
        trainer.run_episodes(4);
        trainer.learner().save_checkpoint(dir + "/final.bin");
    };
    TempDir d1("skid_det_a"), d2("skid_det_b");
    run(d1.path.string());
    run(d2.path.string());
    CHECK(read_file(d1.path / "metrics.csv") == read_file(d2.path / "metrics.csv"));
    CHECK(read_file(d1.path / "episodes.csv") == read_file(d2.path / "episodes.csv"));
    CHECK(read_file(d1.path / "final.bin") == read_file(d2.path / "final.bin"));
}

TEST_CASE("evaluation is reproducible and its counts add up") {
    RunConfig cfg = default_config();
    cfg.hyper.hidden = {16, 16};
    Learner<float> learner(Algorithm::sac, cfg.hyper, cfg.ablation, 3);
    const SuccessReport r1 = evaluate(learner, cfg.env, 20, 999);
    const SuccessReport r2 = evaluate(learner, cfg.env, 20, 999);
    CHECK(r1.to_json() == r2.to_json());
    int total = r1.successes;
    for (const auto& [cause, count] : r1.failures) total += count;
    CHECK(total == r1.n_episodes);
}

TEST_CASE("a full-brake policy almost never succeeds") {
    RunConfig cfg = default_config();
    cfg.hyper.hidden = {16, 16};
    Learner<float> learner(Algorithm::sac, cfg.hyper, cfg.ablation, 4);
    force_constant_policy(learner, -1.0, 0.0);
    const SuccessReport report = evaluate(learner, cfg.env, 50, 1234);
    CHECK(report.success_rate < 0.05);
}

TEST_CASE("an untrained policy stays under the ten percent floor") {
    RunConfig cfg = default_config();
    Learner<float> learner(Algorithm::sac, cfg.hyper, cfg.ablation, 5);
    const SuccessReport report = evaluate(learner, cfg.env, 50, 4321);
    CHECK(report.success_rate < 0.10);
}

TEST_CASE("unavoidable-collision geometry") {
    const RunConfig cfg = default_config();
    Scenario sc;
    sc.entry_lane = 0;
    sc.plate.trigger_x = 100.0;
    VehicleState s;
    s.x = 100.0;
    s.y = sc.lane_center(0);
    s.v_long = 19.44;

    SUBCASE("a free ego lane is always avoidable") {
        Obstacle o;
        o.lane = 1;
        o.station = 108.0;
        sc.obstacles = {o};
        CHECK(!unavoidable_at_plate(s, sc, cfg.env));
    }
    SUBCASE("a distant blocker leaves room to change lanes") {
        Obstacle o;
        o.lane = 0;
        o.station = 160.0;
        sc.obstacles = {o};
        CHECK(!unavoidable_at_plate(s, sc, cfg.env));
    }
    SUBCASE("an imminent blocker with far free lanes is unavoidable") {
        Obstacle ego_block{0, 108.0, 4.5, 1.8};
        Obstacle side_block{1, 140.0, 4.5, 1.8};
        sc.obstacles = {ego_block, side_block};
        // Only lane 2 is free, 7 m of lateral offset away with ~0.15 s of
        // usable maneuver time.
        CHECK(unavoidable_at_plate(s, sc, cfg.env));
    }
}

TEST_CASE("trajectory logs replay byte-identically and export to csv") {
    RunConfig cfg = default_config();
    cfg.hyper.hidden = {16, 16};
    Learner<float> learner(Algorithm::sac, cfg.hyper, cfg.ablation, 6);
    TempDir dir("skid_traj");
    const std::string log1 = (dir.path / "a.jsonl").string();
    const std::string log2 = (dir.path / "b.jsonl").string();
    evaluate(learner, cfg.env, 3, 777, log1);
    evaluate(learner, cfg.env, 3, 777, log2);
    CHECK(read_file(log1) == read_file(log2));

    // Every line parses and carries the full record schema.
    std::ifstream in(log1);
    std::string line;
    int headers = 0, records = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        if (j.contains("type")) {
            ++headers;
            CHECK(j.contains("scenario"));
        } else {
            ++records;
            for (const char* key : {"t", "x", "y", "yaw", "v_long", "v_lat", "beta_deg",
                                    "delta_deg", "pedal", "steer_rate_cmd", "reward",
                                    "reward_components", "terminal_cause"}) {
                CHECK(j.contains(key));
            }
        }
    }
    CHECK(headers == 3);
    CHECK(records > 0);
}
