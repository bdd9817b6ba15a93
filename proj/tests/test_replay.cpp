#include <doctest.h>

#include <cmath>
#include <sstream>

#include "skid/replay.hpp"

using namespace skid;

namespace {

Transition tagged(double reward) {
    Transition t;
    t.reward = reward;
    t.obs[0] = reward;
    t.action = {0.1, -0.2};
    t.next_obs[0] = reward + 1.0;
    return t;
}

Episode episode_with_rewards(std::initializer_list<double> rewards) {
    Episode e;
    for (double r : rewards) e.push_back(tagged(r));
    if (!e.empty()) e.back().done = true;
    return e;
}

}  // namespace

TEST_CASE("ring evicts strictly oldest-first") {
    ReplayBuffer buf(5);
    for (int i = 0; i < 8; ++i) buf.push(tagged(i));
    CHECK(buf.size() == 5);
    // Newest is 7, oldest surviving is 3; 0..2 are gone.
    for (std::size_t age = 0; age < 5; ++age) {
        CHECK(buf.by_age(age).reward == doctest::Approx(7.0 - age));
    }
    CHECK_THROWS_AS(buf.by_age(5), std::out_of_range);
}

TEST_CASE("a single-element buffer always returns that element") {
    ReplayBuffer buf(100);
    buf.push(tagged(42.0));
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const auto batch = buf.sample_fer(3, rng);
        for (const auto* t : batch) CHECK(t->reward == 42.0);
    }
}

TEST_CASE("sampling an empty buffer faults") {
    ReplayBuffer buf(10);
    Rng rng(2);
    CHECK_THROWS_AS(buf.sample_fer(1, rng), std::logic_error);
}

TEST_CASE("recency-weighted ages are in range and biased to the newest") {
    ReplayBuffer buf(2000);
    for (int i = 0; i < 1000; ++i) buf.push(tagged(i));
    Rng rng(3);
    const int draws = 20000;
    int newest_half = 0;
    for (int i = 0; i < draws; ++i) {
        const std::size_t age = buf.sample_age(rng);
        REQUIRE(age < buf.size());
        if (age < 500) ++newest_half;
    }
    // Half-normal with sigma = size/3: P(age < size/2) = erf(1.5/sqrt(2)) ~ 0.866.
    CHECK(newest_half > draws * 0.84);
    CHECK(newest_half < draws * 0.89);
}

TEST_CASE("mean episode reward counts episodes, not steps") {
    DemoDataset ds;
    ds.add_episode(episode_with_rewards({10.0}));
    ds.add_episode(episode_with_rewards({5.0, 5.0, 10.0}));
    CHECK(ds.mean_episode_reward() == doctest::Approx(15.0).epsilon(1e-12));

    DemoDataset single;
    single.add_episode(episode_with_rewards({1.0, 2.0, 3.0}));
    CHECK(single.mean_episode_reward() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("selective admission follows the running-mean rule") {
    DemoDataset ds;
    // Build a dataset with mean exactly 10 over 200 episodes.
    for (int i = 0; i < 200; ++i) ds.add_episode(episode_with_rewards({10.0}));
    REQUIRE(ds.mean_episode_reward() == doctest::Approx(10.0));

    SUBCASE("a better episode is admitted and shifts the mean") {
        CHECK(ds.sddu_consider(episode_with_rewards({12.0}), 12.0));
        CHECK(ds.episode_count() == 201);
        CHECK(ds.mean_episode_reward() == doctest::Approx(10.009950248756219).epsilon(1e-12));
    }
    SUBCASE("an exact tie is rejected") {
        CHECK(!ds.sddu_consider(episode_with_rewards({10.0}), 10.0));
        CHECK(ds.episode_count() == 200);
    }
    SUBCASE("a worse episode is rejected") {
        CHECK(!ds.sddu_consider(episode_with_rewards({9.0}), 9.0));
        CHECK(ds.episode_count() == 200);
    }
}

TEST_CASE("the running mean is monotone and matches a recompute") {
    Rng rng(4);
    DemoDataset ds;
    ds.add_episode(episode_with_rewards({rng.uniform(-30.0, 30.0)}));
    double prev_mean = ds.mean_episode_reward();
    for (int i = 0; i < 2000; ++i) {
        const double r = rng.uniform(-50.0, 70.0);
        const Episode e = episode_with_rewards({r * 0.5, r * 0.5});
        const bool admitted = ds.sddu_consider(e, r);
        CHECK(admitted == (r > prev_mean));
        CHECK(ds.mean_episode_reward() >= prev_mean - 1e-12);
        CHECK(std::abs(ds.mean_episode_reward() - ds.recompute_mean_episode_reward()) < 1e-9);
        prev_mean = ds.mean_episode_reward();
    }
}

TEST_CASE("uniform demo sampling covers all transitions evenly") {
    DemoDataset ds;
    // 1000 transitions across uneven episodes, each tagged uniquely.
    int tag = 0;
    while (tag < 1000) {
        Episode e;
        const int len = std::min(1000 - tag, 7);
        for (int i = 0; i < len; ++i) e.push_back(tagged(tag++));
        e.back().done = true;
        ds.add_episode(std::move(e));
    }
    REQUIRE(ds.transition_count() == 1000);

    Rng rng(5);
    std::vector<int> counts(1000, 0);
    const int draws = 100000;
    for (const auto* t : ds.sample_uniform(draws, rng)) {
        ++counts[static_cast<int>(t->reward)];
    }
    // Expected 100 per transition, sigma ~ 10; require within 5 sigma.
    for (int c : counts) {
        CHECK(c > 50);
        CHECK(c < 150);
    }
}

TEST_CASE("a single-transition dataset always returns it") {
    DemoDataset ds;
    ds.add_episode(episode_with_rewards({3.0}));
    Rng rng(6);
    for (const auto* t : ds.sample_uniform(10, rng)) CHECK(t->reward == 3.0);
}

TEST_CASE("sampling an empty dataset faults") {
    DemoDataset ds;
    Rng rng(7);
    CHECK_THROWS_AS(ds.sample_uniform(1, rng), std::logic_error);
    CHECK_THROWS_AS(ds.mean_episode_reward(), std::logic_error);
}

TEST_CASE("dataset files round-trip bit-exactly") {
    Rng rng(8);
    DemoDataset ds;
    for (int ep = 0; ep < 17; ++ep) {
        Episode e;
        const int len = 1 + static_cast<int>(rng.uniform_int(9));
        for (int i = 0; i < len; ++i) {
            Transition t;
            for (double& v : t.obs) v = rng.normal();
            for (double& v : t.next_obs) v = rng.normal();
            t.action = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            t.reward = rng.normal() * 10.0;
            e.push_back(t);
        }
        e.back().done = true;
        ds.add_episode(std::move(e));
    }

    std::stringstream buf;
    ds.save(buf);
    const DemoDataset back = DemoDataset::load(buf);
    REQUIRE(back.episode_count() == ds.episode_count());
    const double m1 = ds.mean_episode_reward();
    const double m2 = back.mean_episode_reward();
    CHECK(std::memcmp(&m1, &m2, sizeof(double)) == 0);
    for (std::size_t ep = 0; ep < ds.episode_count(); ++ep) {
        const Episode& a = ds.episode(ep);
        const Episode& b = back.episode(ep);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(std::memcmp(a[i].obs.data(), b[i].obs.data(), sizeof(a[i].obs)) == 0);
            CHECK(std::memcmp(a[i].next_obs.data(), b[i].next_obs.data(), sizeof(a[i].next_obs)) == 0);
            CHECK(std::memcmp(a[i].action.data(), b[i].action.data(), sizeof(a[i].action)) == 0);
            CHECK(a[i].reward == b[i].reward);
            CHECK(a[i].done == b[i].done);
        }
    }
    // A second serialization is byte-identical.
    std::stringstream buf2;
    back.save(buf2);
    CHECK(buf.str() == buf2.str());
}

TEST_CASE("done marks only episode ends") {
    DemoDataset ds;
    ds.add_episode(episode_with_rewards({1.0, 2.0, 3.0}));
    const Episode& e = ds.episode(0);
    CHECK(!e[0].done);
    CHECK(!e[1].done);
    CHECK(e[2].done);
}
