#include "skid/trainer.hpp"

#include <cstdio>
#include <filesystem>

#include "skid/errors.hpp"

namespace skid {

template <class S>
Trainer<S>::Trainer(EnvConfig env_cfg, Algorithm algo, HyperParams hp, AblationFlags flags,
                    TrainerConfig cfg, DemoDataset demos, std::uint64_t master_seed)
    : env_cfg_(env_cfg),
      cfg_(std::move(cfg)),
      env_(env_cfg),
      learner_(algo, hp, flags, derive_seed(master_seed, "learner")),
      buffer_(hp.buffer_capacity, hp.fer_sigma_divisor),
      demos_(std::move(demos)),
      master_seed_(master_seed),
      scenario_rng_(derive_rng(master_seed, "scenario")),
      batch_rl_rng_(derive_rng(master_seed, "batch/rl")),
      batch_bc_rng_(derive_rng(master_seed, "batch/bc")),
      explore_rng_(derive_rng(master_seed, "explore")) {
    const bool wants_demo =
        algo == Algorithm::qcsac || algo == Algorithm::bcsac || algo == Algorithm::bc;
    if (wants_demo && demos_.empty()) {
        throw ConfigError("algorithm requires a demonstration dataset");
    }
    if (!cfg_.out_dir.empty()) {
        std::filesystem::create_directories(cfg_.out_dir);
        if (cfg_.write_metrics) {
            metrics_csv_.open(cfg_.out_dir + "/metrics.csv");
            episodes_csv_.open(cfg_.out_dir + "/episodes.csv");
            if (!metrics_csv_ || !episodes_csv_) throw IoError("cannot write metrics files");
            metrics_csv_ << "# config_hash=" << cfg_.config_hash << "\n";
            metrics_csv_ << "grad_step,j_sac,j_bc,mean_c,frac_c_pos,j_q,alpha,r_bar_epi,demo_episodes\n";
            episodes_csv_ << "# config_hash=" << cfg_.config_hash << "\n";
            episodes_csv_ << "episode,return,length,cause,admitted,env_steps,grad_steps\n";
        }
    }
}

template <class S>
bool Trainer<S>::ready_for_gradients() const {
    if (learner_.algorithm() == Algorithm::bc) return !demos_.empty();
    return buffer_.size() >= static_cast<std::size_t>(learner_.hyper().warmup_transitions) &&
           buffer_.size() >= static_cast<std::size_t>(learner_.hyper().batch_rl);
}

template <class S>
void Trainer<S>::gradient_phase() {
    const auto& hp = learner_.hyper();
    const Algorithm algo = learner_.algorithm();
    const bool wants_demo =
        algo == Algorithm::qcsac || algo == Algorithm::bcsac || algo == Algorithm::bc;

    Batch<S> rl;
    if (algo != Algorithm::bc) {
        rl = make_batch<S>(buffer_.sample_fer(hp.batch_rl, batch_rl_rng_), learner_.scales());
    }
    Batch<S> bc;
    if (wants_demo) {
        bc = make_batch<S>(demos_.sample_uniform(hp.batch_bc, batch_bc_rng_), learner_.scales());
    }
    const GradStepMetrics m = learner_.gradient_step(rl, wants_demo ? &bc : nullptr);
    ++stats_.grad_steps;

    if (metrics_csv_.is_open()) {
        char line[256];
        const double r_bar = demos_.empty() ? 0.0 : demos_.mean_episode_reward();
        std::snprintf(line, sizeof(line), "%lld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%zu\n",
                      static_cast<long long>(stats_.grad_steps), m.j_sac, m.j_bc, m.mean_c,
                      m.frac_c_pos, m.j_q, m.alpha, r_bar, demos_.episode_count());
        metrics_csv_ << line;
    }
}

template <class S>
GradStepMetrics Trainer<S>::probe_gradient_step() {
    const auto& hp = learner_.hyper();
    Batch<S> rl = make_batch<S>(buffer_.sample_fer(hp.batch_rl, batch_rl_rng_), learner_.scales());
    Batch<S> bc;
    const bool wants_demo = !demos_.empty();
    if (wants_demo) {
        bc = make_batch<S>(demos_.sample_uniform(hp.batch_bc, batch_bc_rng_), learner_.scales());
    }
    const GradStepMetrics m = learner_.gradient_step(rl, wants_demo ? &bc : nullptr);
    ++stats_.grad_steps;
    return m;
}

template <class S>
void Trainer<S>::finish_episode() {
    const double r_epi = episode_reward(current_episode_);
    bool admitted = false;
    if (learner_.flags().use_sddu && !current_episode_.empty()) {
        admitted = demos_.sddu_consider(current_episode_, r_epi);
        if (admitted) ++stats_.sddu_admissions;
    }
    ++stats_.episodes;
    recent_returns_.push_back(r_epi);
    if (recent_returns_.size() > 100) recent_returns_.erase(recent_returns_.begin());
    double sum = 0.0;
    for (double r : recent_returns_) sum += r;
    stats_.mean_return_last100 = sum / static_cast<double>(recent_returns_.size());

    if (episodes_csv_.is_open()) {
        char line[256];
        std::snprintf(line, sizeof(line), "%d,%.9g,%zu,%s,%d,%lld,%lld\n", stats_.episodes, r_epi,
                      current_episode_.size(), to_string(env_.cause()), admitted ? 1 : 0,
                      static_cast<long long>(stats_.env_steps),
                      static_cast<long long>(stats_.grad_steps));
        episodes_csv_ << line;
    }
    if (cfg_.verbose && stats_.episodes % 100 == 0) {
        std::printf("[train] ep %d return %.2f len %zu cause %s buffer %zu demos %zu\n",
                    stats_.episodes, r_epi, current_episode_.size(), to_string(env_.cause()),
                    buffer_.size(), demos_.episode_count());
        std::fflush(stdout);
    }
    current_episode_.clear();

    if (!cfg_.out_dir.empty() && cfg_.checkpoint_every > 0 &&
        stats_.episodes % cfg_.checkpoint_every == 0) {
        learner_.save_checkpoint(cfg_.out_dir + "/checkpoint_ep" + std::to_string(stats_.episodes) +
                                 ".bin");
    }
}

template <class S>
void Trainer<S>::run_episodes(int n) {
    const auto& hp = learner_.hyper();
    for (int ep = 0; ep < n; ++ep) {
        Observation obs = env_.reset(scenario_rng_);
        while (!env_.done()) {
            const auto raw = obs.flatten();
            std::array<double, kActionDim> action;
            if (stats_.env_steps < hp.random_action_steps &&
                learner_.algorithm() != Algorithm::bc) {
                action = {explore_rng_.uniform(-1.0, 1.0), explore_rng_.uniform(-1.0, 1.0)};
            } else {
                action = learner_.act(raw, /*deterministic=*/false);
            }
            const StepOutcome out = env_.step(action);

            Transition t;
            t.obs = raw;
            t.action = action;
            t.reward = out.reward;
            t.next_obs = out.obs.flatten();
            t.done = out.done;
            buffer_.push(t);
            current_episode_.push_back(t);
            ++stats_.env_steps;
            obs = out.obs;

            grad_accumulator_ += hp.gradient_steps_per_env_step;
            if (ready_for_gradients()) {
                while (grad_accumulator_ >= 1.0) {
                    gradient_phase();
                    grad_accumulator_ -= 1.0;
                }
            } else if (grad_accumulator_ > 1.0) {
                grad_accumulator_ = 1.0;  // don't burst-replay the warm-up backlog
            }
        }
        finish_episode();
    }
}

template <class S>
void Trainer<S>::run() {
    run_episodes(cfg_.episodes);
    if (!cfg_.out_dir.empty()) {
        learner_.save_checkpoint(cfg_.out_dir + "/checkpoint_final.bin");
    }
}

template class Trainer<float>;
template class Trainer<double>;

}  // namespace skid
