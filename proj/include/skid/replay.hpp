#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "skid/observation.hpp"
#include "skid/rng.hpp"

namespace skid {

// One (s, a, r, s', done) record, physical units.
struct Transition {
    std::array<double, kObsDim> obs{};
    std::array<double, kActionDim> action{};
    double reward = 0.0;
    std::array<double, kObsDim> next_obs{};
    bool done = false;
};

using Episode = std::vector<Transition>;

// Fixed-capacity ring with recency-biased sampling: each draw picks an age
// offset floor(|z| * sigma) with z standard normal and sigma = size / 3
// (half-normal over ages, newest most likely), clamped into range.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity, double sigma_divisor = 3.0);

    void push(const Transition& t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }

    // Index `age` slots before the newest insertion.
    const Transition& by_age(std::size_t age) const;

    std::size_t sample_age(Rng& rng) const;
    std::vector<const Transition*> sample_fer(std::size_t n, Rng& rng) const;

    double sigma() const { return static_cast<double>(size_) / sigma_divisor_; }

  private:
    std::vector<Transition> ring_;
    std::size_t capacity_;
    std::size_t head_ = 0;  // next write slot
    std::size_t size_ = 0;
    double sigma_divisor_;
};

// Episode-structured demonstration store. Admission follows the selective
// update rule: an episode enters only when its return beats the running
// mean episode reward, which is then folded in incrementally.
class DemoDataset {
  public:
    DemoDataset() = default;

    // Unconditional append (initial dataset collection).
    void add_episode(Episode episode);

    // Returns true and admits when r_epi > mean_episode_reward().
    bool sddu_consider(const Episode& episode, double r_epi);

    std::size_t episode_count() const { return episodes_.size(); }
    std::size_t transition_count() const { return flat_.size(); }
    bool empty() const { return episodes_.empty(); }
    double mean_episode_reward() const;

    // Recomputed from scratch; the incremental value must match it.
    double recompute_mean_episode_reward() const;

    const Episode& episode(std::size_t i) const { return episodes_[i]; }

    // Uniform over all stored transitions, with replacement.
    std::vector<const Transition*> sample_uniform(std::size_t n, Rng& rng) const;

    void save(std::ostream& out) const;
    static DemoDataset load(std::istream& in);
    void save_file(const std::string& path) const;
    static DemoDataset load_file(const std::string& path);

  private:
    std::vector<Episode> episodes_;
    std::vector<const Transition*> flat_;
    double mean_episode_reward_ = 0.0;

    void reindex();
};

double episode_reward(const Episode& e);

}  // namespace skid
