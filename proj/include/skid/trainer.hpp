#pragma once

#include <fstream>
#include <memory>
#include <string>

#include "skid/env.hpp"
#include "skid/learner.hpp"

namespace skid {

struct TrainerConfig {
    int episodes = 2000;
    int checkpoint_every = 100;  // episodes; 0 disables periodic checkpoints
    int eval_every = 0;          // episodes; 0 disables periodic evaluation
    int eval_episodes = 20;
    std::string out_dir;  // empty: no files written
    std::uint64_t config_hash = 0;
    bool write_metrics = true;
    bool verbose = false;
};

struct RunStats {
    int episodes = 0;
    std::int64_t env_steps = 0;
    std::int64_t grad_steps = 0;
    int sddu_admissions = 0;
    double mean_return_last100 = 0.0;
    double best_eval_success = -1.0;
};

// The interaction/gradient loop: rolls episodes, feeds the replay buffer
// and (when enabled) the selective demonstration update, and interleaves
// gradient steps at the configured ratio.
template <class S>
class Trainer {
  public:
    Trainer(EnvConfig env_cfg, Algorithm algo, HyperParams hp, AblationFlags flags,
            TrainerConfig cfg, DemoDataset demos, std::uint64_t master_seed);

    void run();
    void run_episodes(int n);

    Learner<S>& learner() { return learner_; }
    const DemoDataset& demos() const { return demos_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    const RunStats& stats() const { return stats_; }
    Environment& env() { return env_; }

    // One gradient step on freshly sampled batches (used by warm-up probes).
    GradStepMetrics probe_gradient_step();

  private:
    void finish_episode();
    void gradient_phase();
    bool ready_for_gradients() const;

    EnvConfig env_cfg_;
    TrainerConfig cfg_;
    Environment env_;
    Learner<S> learner_;
    ReplayBuffer buffer_;
    DemoDataset demos_;
    Episode current_episode_;
    std::uint64_t master_seed_;

    Rng scenario_rng_, batch_rl_rng_, batch_bc_rng_, explore_rng_;
    double grad_accumulator_ = 0.0;
    RunStats stats_;
    double return_sum_last100_ = 0.0;
    std::vector<double> recent_returns_;

    std::ofstream metrics_csv_;
    std::ofstream episodes_csv_;
};

}  // namespace skid
