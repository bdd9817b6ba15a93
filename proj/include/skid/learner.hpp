#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skid/policy.hpp"
#include "skid/replay.hpp"

namespace skid {

enum class Algorithm { qcsac, bcsac, sac, bc };

const char* to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);

struct HyperParams {
    double gamma = 0.99;
    double tau = 0.005;
    double target_entropy = -static_cast<double>(kActionDim);
    int batch_rl = 256;
    int batch_bc = 256;
    double gradient_steps_per_env_step = 1.0;
    double bcsac_lambda = 1.0;
    double c_max = 100.0;  // clip on the Q-compared weight; <= 0 disables BC entirely
    double lr_q = 3e-4;
    double lr_pi = 3e-4;
    double lr_alpha = 3e-4;
    double init_alpha = 1.0;
    int warmup_transitions = 1000;   // buffer fill before gradient steps
    int random_action_steps = 1000;  // uniform exploration at the start
    double fer_sigma_divisor = 3.0;
    std::size_t buffer_capacity = 1000000;
    std::vector<int> hidden = {256, 256};

    bool valid() const {
        return gamma > 0.0 && gamma < 1.0 && tau > 0.0 && tau <= 1.0 && batch_rl >= 1 &&
               batch_bc >= 1 && gradient_steps_per_env_step > 0.0 && lr_q > 0.0 && lr_pi > 0.0 &&
               lr_alpha > 0.0 && init_alpha > 0.0 && fer_sigma_divisor > 0.0 &&
               buffer_capacity > 0 && !hidden.empty();
    }
};

struct AblationFlags {
    bool use_qnfd = true;
    bool use_sddu = true;
};

// Normalized column-batch view of transitions.
template <class S>
struct Batch {
    Mat<S> obs;
    Mat<S> act;
    Vec<S> rew;
    Mat<S> next_obs;
    Vec<S> done;

    Eigen::Index size() const { return obs.cols(); }
};

template <class S>
Batch<S> make_batch(const std::vector<const Transition*>& ts, const ObsScales& scales);
template <class S>
Batch<S> concat_batches(const Batch<S>& a, const Batch<S>& b);

// ----- loss kernels -----
// Free functions so the gradient oracle can exercise each in isolation.

// Per-sample targets r + (1 - done) * gamma * (min_i Q^-_i(s', a') - alpha
// * log pi(a'|s')), a' freshly sampled. No gradient flows through targets.
template <class S>
Vec<S> q_target(const Mlp<S>& tq1, const Mlp<S>& tq2, const PolicyNet<S>& policy,
                const Batch<S>& b, S alpha, S gamma, Rng& eps_rng);

// Mean squared Bellman error of one Q net against fixed targets;
// accumulates parameter gradients. Returns the loss.
template <class S>
S q_loss_and_grads(const Mlp<S>& q, const Batch<S>& b, const Vec<S>& y,
                   typename Mlp<S>::Grads& grads);

template <class S>
struct SacPolicyLossResult {
    S loss = S(0);
    Vec<S> log_prob;  // kept for the temperature update
};

// J_SAC = mean(alpha * log pi(a|s) - min_i Q_i(s, a)), a reparameterized.
template <class S>
SacPolicyLossResult<S> sac_policy_loss_and_grads(const PolicyNet<S>& policy, const Mlp<S>& q1,
                                                 const Mlp<S>& q2, const Mat<S>& obs, S alpha,
                                                 Rng& eps_rng,
                                                 typename PolicyNet<S>::Grads& grads);

// C = min(c_max, max(minQ^-(s_d, a_d) - minQ(s_d, a~pi), 0)), detached.
template <class S>
Vec<S> qc_weights(const Mlp<S>& q1, const Mlp<S>& q2, const Mlp<S>& tq1, const Mlp<S>& tq2,
                  const Mat<S>& obs_d, const Mat<S>& act_d, const Mat<S>& act_pi, S c_max);

template <class S>
struct QcoLossResult {
    S loss = S(0);
    S mean_c = S(0);
    S frac_c_pos = S(0);
};

// J_BC = mean(C(s_d, a_d) * ||a - a_d||_1), a reparameterized at s_d.
template <class S>
QcoLossResult<S> qco_bc_loss_and_grads(const PolicyNet<S>& policy, const Mlp<S>& q1,
                                       const Mlp<S>& q2, const Mlp<S>& tq1, const Mlp<S>& tq2,
                                       const Mat<S>& obs_d, const Mat<S>& act_d, S c_max,
                                       Rng& eps_rng, typename PolicyNet<S>::Grads& grads);

// -lambda * mean(log pi(a_d | s_d)); demo actions atanh'd with clipping.
template <class S>
S bcsac_bc_loss_and_grads(const PolicyNet<S>& policy, const Mat<S>& obs_d, const Mat<S>& act_d,
                          S lambda, typename PolicyNet<S>::Grads& grads);

// Plain behavior cloning: mean L1 between tanh(mean(s_d)) and a_d.
template <class S>
S bc_loss_and_grads(const PolicyNet<S>& policy, const Mat<S>& obs_d, const Mat<S>& act_d,
                    typename PolicyNet<S>::Grads& grads);

// J(alpha) = mean(-alpha * (log pi + target_entropy)); optimized in log
// space. Returns {loss, d loss / d log_alpha}.
template <class S>
std::pair<S, S> alpha_loss_and_grad(S log_alpha, const Vec<S>& log_prob, S target_entropy);

struct GradStepMetrics {
    double j_q = 0.0;
    double j_sac = 0.0;
    double j_bc = 0.0;
    double mean_c = 0.0;
    double frac_c_pos = 0.0;
    double alpha = 0.0;
};

// Networks, optimizers and the gradient phase of one training run.
template <class S>
class Learner {
  public:
    Learner(Algorithm algo, HyperParams hp, AblationFlags flags, std::uint64_t seed);

    // One gradient step on the given batches. `bc` may be null for sac/
    // qnfd-less configurations; algorithms that need it fault if absent.
    GradStepMetrics gradient_step(const Batch<S>& rl, const Batch<S>* bc);

    std::array<double, kActionDim> act(const std::array<double, kObsDim>& raw_obs,
                                       bool deterministic);

    Algorithm algorithm() const { return algo_; }
    const HyperParams& hyper() const { return hp_; }
    const AblationFlags& flags() const { return flags_; }
    double alpha() const { return static_cast<double>(std::exp(log_alpha_)); }
    const ObsScales& scales() const { return scales_; }

    PolicyNet<S>& policy() { return policy_; }
    const PolicyNet<S>& policy() const { return policy_; }
    Mlp<S>& q1() { return q1_; }
    Mlp<S>& q2() { return q2_; }
    Mlp<S>& target_q1() { return tq1_; }
    Mlp<S>& target_q2() { return tq2_; }

    // Every parameter in a fixed order; used by the equivalence suite.
    std::vector<double> flatten_params() const;

    TensorStore to_store() const;
    void load_store(const TensorStore& store);
    void save_checkpoint(const std::string& path) const;
    static Learner load_checkpoint(const std::string& path);

  private:
    Algorithm algo_;
    HyperParams hp_;
    AblationFlags flags_;
    ObsScales scales_;

    PolicyNet<S> policy_;
    Mlp<S> q1_, q2_, tq1_, tq2_;
    S log_alpha_ = S(0);

    typename PolicyNet<S>::Grads pi_grads_;
    typename Mlp<S>::Grads q1_grads_, q2_grads_;
    Vec<S> log_alpha_vec_, log_alpha_grad_;

    Adam<S> opt_pi_, opt_q1_, opt_q2_, opt_alpha_;
    Rng eps_rl_, eps_bc_, act_rng_;
};

}  // namespace skid
