#include "skid/learner.hpp"

#include <cmath>
#include <fstream>

#include "skid/errors.hpp"

namespace skid {

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::qcsac: return "qcsac";
        case Algorithm::bcsac: return "bcsac";
        case Algorithm::sac: return "sac";
        case Algorithm::bc: return "bc";
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
    if (name == "qcsac") return Algorithm::qcsac;
    if (name == "bcsac") return Algorithm::bcsac;
    if (name == "sac") return Algorithm::sac;
    if (name == "bc") return Algorithm::bc;
    return std::nullopt;
}

template <class S>
Batch<S> make_batch(const std::vector<const Transition*>& ts, const ObsScales& scales) {
    const Eigen::Index n = static_cast<Eigen::Index>(ts.size());
    Batch<S> b;
    b.obs = Mat<S>(kObsDim, n);
    b.act = Mat<S>(kActionDim, n);
    b.rew = Vec<S>(n);
    b.next_obs = Mat<S>(kObsDim, n);
    b.done = Vec<S>(n);
    const auto sc = scales.scales();
    for (Eigen::Index c = 0; c < n; ++c) {
        const Transition& t = *ts[c];
        for (int r = 0; r < kObsDim; ++r) {
            b.obs(r, c) = static_cast<S>(t.obs[r] / sc[r]);
            b.next_obs(r, c) = static_cast<S>(t.next_obs[r] / sc[r]);
        }
        for (int r = 0; r < kActionDim; ++r) b.act(r, c) = static_cast<S>(t.action[r]);
        b.rew(c) = static_cast<S>(t.reward);
        b.done(c) = t.done ? S(1) : S(0);
    }
    return b;
}

template <class S>
Batch<S> concat_batches(const Batch<S>& a, const Batch<S>& b) {
    Batch<S> u;
    u.obs = Mat<S>(a.obs.rows(), a.size() + b.size());
    u.obs << a.obs, b.obs;
    u.act = Mat<S>(a.act.rows(), a.size() + b.size());
    u.act << a.act, b.act;
    u.rew = Vec<S>(a.size() + b.size());
    u.rew << a.rew, b.rew;
    u.next_obs = Mat<S>(a.next_obs.rows(), a.size() + b.size());
    u.next_obs << a.next_obs, b.next_obs;
    u.done = Vec<S>(a.size() + b.size());
    u.done << a.done, b.done;
    return u;
}

namespace {

// Column-wise min of two 1 x B rows plus the argmin masks.
template <class S>
void row_min(const Mat<S>& a, const Mat<S>& b, Vec<S>& out, Vec<S>* mask_a = nullptr) {
    const Eigen::Index n = a.cols();
    out.resize(n);
    if (mask_a) mask_a->resize(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const bool first = a(0, c) <= b(0, c);
        out(c) = first ? a(0, c) : b(0, c);
        if (mask_a) (*mask_a)(c) = first ? S(1) : S(0);
    }
}

}  // namespace

template <class S>
Vec<S> q_target(const Mlp<S>& tq1, const Mlp<S>& tq2, const PolicyNet<S>& policy,
                const Batch<S>& b, S alpha, S gamma, Rng& eps_rng) {
    typename PolicyNet<S>::Cache pc;
    policy.forward(b.next_obs, pc);
    const auto next = policy.sample(pc, eps_rng);
    const Mat<S> qin = q_input(b.next_obs, next.action);
    const Mat<S> q1v = tq1.forward(qin);
    const Mat<S> q2v = tq2.forward(qin);
    Vec<S> qmin;
    row_min(q1v, q2v, qmin);
    Vec<S> y(b.size());
    for (Eigen::Index c = 0; c < b.size(); ++c) {
        y(c) = b.rew(c) +
               (S(1) - b.done(c)) * gamma * (qmin(c) - alpha * next.log_prob(c));
    }
    return y;
}

template <class S>
S q_loss_and_grads(const Mlp<S>& q, const Batch<S>& b, const Vec<S>& y,
                   typename Mlp<S>::Grads& grads) {
    typename Mlp<S>::Cache cache;
    const Mat<S> qin = q_input(b.obs, b.act);
    const Mat<S> pred = q.forward(qin, &cache);
    const Eigen::Index n = b.size();
    Mat<S> diff = pred;
    diff.row(0) -= y.transpose();
    const S loss = diff.row(0).array().square().sum() / S(n);
    const Mat<S> dy = diff * (S(2) / S(n));
    q.backward(cache, dy, grads);
    return loss;
}

template <class S>
SacPolicyLossResult<S> sac_policy_loss_and_grads(const PolicyNet<S>& policy, const Mlp<S>& q1,
                                                 const Mlp<S>& q2, const Mat<S>& obs, S alpha,
                                                 Rng& eps_rng,
                                                 typename PolicyNet<S>::Grads& grads) {
    const Eigen::Index n = obs.cols();
    typename PolicyNet<S>::Cache pc;
    policy.forward(obs, pc);
    const auto smp = policy.sample(pc, eps_rng);

    typename Mlp<S>::Cache c1, c2;
    const Mat<S> qin = q_input(obs, smp.action);
    const Mat<S> q1v = q1.forward(qin, &c1);
    const Mat<S> q2v = q2.forward(qin, &c2);
    Vec<S> qmin, mask1;
    row_min(q1v, q2v, qmin, &mask1);

    SacPolicyLossResult<S> res;
    res.loss = (alpha * smp.log_prob.array() - qmin.array()).mean();
    res.log_prob = smp.log_prob;

    // d loss / d qmin = -1/n, routed through whichever net won the min.
    Mat<S> d1(1, n), d2(1, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const S v = S(-1) / S(n);
        d1(0, c) = mask1(c) * v;
        d2(0, c) = (S(1) - mask1(c)) * v;
    }
    const Mat<S> dx1 = q1.backward_input(c1, d1);
    const Mat<S> dx2 = q2.backward_input(c2, d2);
    const Mat<S> d_action =
        dx1.bottomRows(kActionDim) + dx2.bottomRows(kActionDim);
    const Vec<S> d_log_prob = Vec<S>::Constant(n, alpha / S(n));
    policy.backward_sample(pc, smp, d_action, d_log_prob, grads);
    return res;
}

template <class S>
Vec<S> qc_weights(const Mlp<S>& q1, const Mlp<S>& q2, const Mlp<S>& tq1, const Mlp<S>& tq2,
                  const Mat<S>& obs_d, const Mat<S>& act_d, const Mat<S>& act_pi, S c_max) {
    const Mat<S> qin_demo = q_input(obs_d, act_d);
    const Mat<S> qt1 = tq1.forward(qin_demo);
    const Mat<S> qt2 = tq2.forward(qin_demo);
    Vec<S> q_demo;
    row_min(qt1, qt2, q_demo);

    const Mat<S> qin_pi = q_input(obs_d, act_pi);
    const Mat<S> qp1 = q1.forward(qin_pi);
    const Mat<S> qp2 = q2.forward(qin_pi);
    Vec<S> q_pi;
    row_min(qp1, qp2, q_pi);

    Vec<S> c(obs_d.cols());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        c(i) = std::min(c_max, std::max(q_demo(i) - q_pi(i), S(0)));
    }
    return c;
}

template <class S>
QcoLossResult<S> qco_bc_loss_and_grads(const PolicyNet<S>& policy, const Mlp<S>& q1,
                                       const Mlp<S>& q2, const Mlp<S>& tq1, const Mlp<S>& tq2,
                                       const Mat<S>& obs_d, const Mat<S>& act_d, S c_max,
                                       Rng& eps_rng, typename PolicyNet<S>::Grads& grads) {
    const Eigen::Index n = obs_d.cols();
    typename PolicyNet<S>::Cache pc;
    policy.forward(obs_d, pc);
    const auto smp = policy.sample(pc, eps_rng);

    // One reparameterized draw per demo state serves both the weight and
    // the L1 term; the weight itself is a constant.
    const Vec<S> c = qc_weights(q1, q2, tq1, tq2, obs_d, act_d, smp.action, c_max);

    QcoLossResult<S> res;
    Mat<S> d_action(kActionDim, n);
    S loss = S(0);
    Eigen::Index n_pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        S l1 = S(0);
        for (int r = 0; r < kActionDim; ++r) {
            const S diff = smp.action(r, i) - act_d(r, i);
            l1 += std::abs(diff);
            const S sign = diff > S(0) ? S(1) : (diff < S(0) ? S(-1) : S(0));
            d_action(r, i) = c(i) * sign / S(n);
        }
        loss += c(i) * l1;
        if (c(i) > S(0)) ++n_pos;
    }
    res.loss = loss / S(n);
    res.mean_c = c.mean();
    res.frac_c_pos = S(n_pos) / S(n);

    const Vec<S> d_log_prob = Vec<S>::Zero(n);
    policy.backward_sample(pc, smp, d_action, d_log_prob, grads);
    return res;
}

template <class S>
S bcsac_bc_loss_and_grads(const PolicyNet<S>& policy, const Mat<S>& obs_d, const Mat<S>& act_d,
                          S lambda, typename PolicyNet<S>::Grads& grads) {
    const Eigen::Index n = obs_d.cols();
    typename PolicyNet<S>::Cache pc;
    policy.forward(obs_d, pc);
    Mat<S> z;
    const Vec<S> lp = policy.log_prob_of(pc, act_d, &z);
    const S loss = -lambda * lp.mean();
    const Vec<S> d_lp = Vec<S>::Constant(n, -lambda / S(n));
    policy.backward_log_prob_of(pc, z, d_lp, grads);
    return loss;
}

template <class S>
S bc_loss_and_grads(const PolicyNet<S>& policy, const Mat<S>& obs_d, const Mat<S>& act_d,
                    typename PolicyNet<S>::Grads& grads) {
    const Eigen::Index n = obs_d.cols();
    typename PolicyNet<S>::Cache pc;
    policy.forward(obs_d, pc);
    const Mat<S> pred = pc.mean.array().tanh().matrix();
    Mat<S> d_action(kActionDim, n);
    S loss = S(0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int r = 0; r < kActionDim; ++r) {
            const S diff = pred(r, i) - act_d(r, i);
            loss += std::abs(diff);
            d_action(r, i) = (diff > S(0) ? S(1) : (diff < S(0) ? S(-1) : S(0))) / S(n);
        }
    }
    policy.backward_mean_action(pc, d_action, grads);
    return loss / S(n);
}

template <class S>
std::pair<S, S> alpha_loss_and_grad(S log_alpha, const Vec<S>& log_prob, S target_entropy) {
    const S alpha = std::exp(log_alpha);
    const S mean_term = (log_prob.array() + target_entropy).mean();
    const S loss = -alpha * mean_term;
    // d/d log_alpha of -exp(log_alpha) * mean_term
    const S grad = -alpha * mean_term;
    return {loss, grad};
}

// ----- Learner -----

template <class S>
Learner<S>::Learner(Algorithm algo, HyperParams hp, AblationFlags flags, std::uint64_t seed)
    : algo_(algo), hp_(std::move(hp)), flags_(flags) {
    if (!hp_.valid()) throw ConfigError("invalid hyperparameters");
    Rng init_pi = derive_rng(seed, "init/policy");
    Rng init_q1 = derive_rng(seed, "init/q1");
    Rng init_q2 = derive_rng(seed, "init/q2");
    eps_rl_ = derive_rng(seed, "eps/rl");
    eps_bc_ = derive_rng(seed, "eps/bc");
    act_rng_ = derive_rng(seed, "act");

    policy_ = PolicyNet<S>::random(kObsDim, kActionDim, hp_.hidden, init_pi);
    std::vector<int> q_widths;
    q_widths.push_back(kObsDim + kActionDim);
    q_widths.insert(q_widths.end(), hp_.hidden.begin(), hp_.hidden.end());
    q_widths.push_back(1);
    q1_ = Mlp<S>::random(q_widths, init_q1);
    q2_ = Mlp<S>::random(q_widths, init_q2);
    tq1_ = q1_;
    tq2_ = q2_;
    log_alpha_ = static_cast<S>(std::log(hp_.init_alpha));

    pi_grads_ = PolicyNet<S>::Grads::zeros_like(policy_);
    q1_grads_ = Mlp<S>::Grads::zeros_like(q1_);
    q2_grads_ = Mlp<S>::Grads::zeros_like(q2_);
    log_alpha_vec_ = Vec<S>::Constant(1, log_alpha_);
    log_alpha_grad_ = Vec<S>::Zero(1);

    opt_pi_ = Adam<S>(static_cast<S>(hp_.lr_pi));
    opt_q1_ = Adam<S>(static_cast<S>(hp_.lr_q));
    opt_q2_ = Adam<S>(static_cast<S>(hp_.lr_q));
    opt_alpha_ = Adam<S>(static_cast<S>(hp_.lr_alpha));
}

template <class S>
GradStepMetrics Learner<S>::gradient_step(const Batch<S>& rl, const Batch<S>* bc) {
    GradStepMetrics m;
    const S alpha = std::exp(log_alpha_);
    const bool uses_q = algo_ != Algorithm::bc;
    const bool wants_demo = algo_ == Algorithm::qcsac || algo_ == Algorithm::bcsac ||
                            algo_ == Algorithm::bc;
    if (wants_demo && bc == nullptr) {
        throw std::logic_error("algorithm requires a demonstration batch");
    }

    if (uses_q) {
        // Q update; with QNfD the batch is the RL/demo union.
        const bool unite = flags_.use_qnfd && bc != nullptr;
        const Batch<S> combined = unite ? concat_batches(rl, *bc) : Batch<S>{};
        const Batch<S>& qb = unite ? combined : rl;
        const Vec<S> y = q_target(tq1_, tq2_, policy_, qb, alpha, static_cast<S>(hp_.gamma),
                                  eps_rl_);
        q1_grads_.zero();
        q2_grads_.zero();
        const S jq1 = q_loss_and_grads(q1_, qb, y, q1_grads_);
        const S jq2 = q_loss_and_grads(q2_, qb, y, q2_grads_);
        opt_q1_.step(tensor_refs(q1_, q1_grads_));
        opt_q2_.step(tensor_refs(q2_, q2_grads_));
        m.j_q = 0.5 * (static_cast<double>(jq1) + static_cast<double>(jq2));
    }

    pi_grads_.zero();
    Vec<S> rl_log_prob;
    switch (algo_) {
        case Algorithm::sac: {
            const auto res =
                sac_policy_loss_and_grads(policy_, q1_, q2_, rl.obs, alpha, eps_rl_, pi_grads_);
            m.j_sac = static_cast<double>(res.loss);
            rl_log_prob = res.log_prob;
            break;
        }
        case Algorithm::qcsac: {
            const auto res =
                sac_policy_loss_and_grads(policy_, q1_, q2_, rl.obs, alpha, eps_rl_, pi_grads_);
            m.j_sac = static_cast<double>(res.loss);
            rl_log_prob = res.log_prob;
            const auto qco = qco_bc_loss_and_grads(policy_, q1_, q2_, tq1_, tq2_, bc->obs,
                                                   bc->act, static_cast<S>(hp_.c_max), eps_bc_,
                                                   pi_grads_);
            m.j_bc = static_cast<double>(qco.loss);
            m.mean_c = static_cast<double>(qco.mean_c);
            m.frac_c_pos = static_cast<double>(qco.frac_c_pos);
            break;
        }
        case Algorithm::bcsac: {
            const auto res =
                sac_policy_loss_and_grads(policy_, q1_, q2_, rl.obs, alpha, eps_rl_, pi_grads_);
            m.j_sac = static_cast<double>(res.loss);
            rl_log_prob = res.log_prob;
            m.j_bc = static_cast<double>(bcsac_bc_loss_and_grads(
                policy_, bc->obs, bc->act, static_cast<S>(hp_.bcsac_lambda), pi_grads_));
            break;
        }
        case Algorithm::bc: {
            m.j_bc = static_cast<double>(bc_loss_and_grads(policy_, bc->obs, bc->act, pi_grads_));
            break;
        }
    }
    opt_pi_.step(policy_.tensor_refs(pi_grads_));

    if (uses_q) {
        const auto [a_loss, a_grad] = alpha_loss_and_grad(
            log_alpha_, rl_log_prob, static_cast<S>(hp_.target_entropy));
        (void)a_loss;
        log_alpha_vec_(0) = log_alpha_;
        log_alpha_grad_(0) = a_grad;
        opt_alpha_.step({tensor_ref(log_alpha_vec_, log_alpha_grad_)});
        log_alpha_ = log_alpha_vec_(0);

        polyak_update(tq1_, q1_, static_cast<S>(hp_.tau));
        polyak_update(tq2_, q2_, static_cast<S>(hp_.tau));
    }
    m.alpha = alpha;
    return m;
}

template <class S>
std::array<double, kActionDim> Learner<S>::act(const std::array<double, kObsDim>& raw_obs,
                                               bool deterministic) {
    Mat<S> obs(kObsDim, 1);
    const auto sc = scales_.scales();
    for (int r = 0; r < kObsDim; ++r) obs(r, 0) = static_cast<S>(raw_obs[r] / sc[r]);
    if (deterministic) {
        const Mat<S> a = policy_.deterministic_action(obs);
        return {static_cast<double>(a(0, 0)), static_cast<double>(a(1, 0))};
    }
    typename PolicyNet<S>::Cache pc;
    policy_.forward(obs, pc);
    const auto smp = policy_.sample(pc, act_rng_);
    return {static_cast<double>(smp.action(0, 0)), static_cast<double>(smp.action(1, 0))};
}

template <class S>
std::vector<double> Learner<S>::flatten_params() const {
    std::vector<double> out;
    auto push_mlp = [&](const Mlp<S>& net) {
        for (const auto& l : net.layers) {
            for (Eigen::Index i = 0; i < l.w.size(); ++i) out.push_back(l.w.data()[i]);
            for (Eigen::Index i = 0; i < l.b.size(); ++i) out.push_back(l.b.data()[i]);
        }
    };
    push_mlp(policy_.trunk);
    for (Eigen::Index i = 0; i < policy_.mean_head.w.size(); ++i)
        out.push_back(policy_.mean_head.w.data()[i]);
    for (Eigen::Index i = 0; i < policy_.mean_head.b.size(); ++i)
        out.push_back(policy_.mean_head.b.data()[i]);
    for (Eigen::Index i = 0; i < policy_.logstd_head.w.size(); ++i)
        out.push_back(policy_.logstd_head.w.data()[i]);
    for (Eigen::Index i = 0; i < policy_.logstd_head.b.size(); ++i)
        out.push_back(policy_.logstd_head.b.data()[i]);
    push_mlp(q1_);
    push_mlp(q2_);
    push_mlp(tq1_);
    push_mlp(tq2_);
    out.push_back(static_cast<double>(log_alpha_));
    return out;
}

namespace {

template <class S>
void store_mlp(TensorStore& store, const std::string& prefix, const Mlp<S>& net) {
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        store.put(prefix + "/" + std::to_string(i) + "/w", net.layers[i].w);
        store.put(prefix + "/" + std::to_string(i) + "/b", Mat<S>(net.layers[i].b));
    }
    store.put_scalar(prefix + "/n_layers", static_cast<double>(net.layers.size()));
}

template <class S>
void load_mlp(const TensorStore& store, const std::string& prefix, Mlp<S>& net) {
    const auto n = static_cast<std::size_t>(store.get_scalar(prefix + "/n_layers"));
    if (n != net.layers.size()) throw IoError("checkpoint layer count mismatch at " + prefix);
    for (std::size_t i = 0; i < n; ++i) {
        const Mat<S> w = store.template get_as<S>(prefix + "/" + std::to_string(i) + "/w");
        const Mat<S> b = store.template get_as<S>(prefix + "/" + std::to_string(i) + "/b");
        if (w.rows() != net.layers[i].w.rows() || w.cols() != net.layers[i].w.cols()) {
            throw IoError("checkpoint shape mismatch at " + prefix);
        }
        net.layers[i].w = w;
        net.layers[i].b = b.col(0);
    }
}

template <class S>
void store_adam(TensorStore& store, const std::string& prefix, const Adam<S>& opt) {
    const auto& m = opt.first_moments();
    const auto& v = opt.second_moments();
    store.put_scalar(prefix + "/t", static_cast<double>(opt.steps_taken()));
    store.put_scalar(prefix + "/n", static_cast<double>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        store.put(prefix + "/m" + std::to_string(i), Mat<S>(m[i]));
        store.put(prefix + "/v" + std::to_string(i), Mat<S>(v[i]));
    }
}

template <class S>
void load_adam(const TensorStore& store, const std::string& prefix, Adam<S>& opt) {
    opt.set_steps_taken(static_cast<std::int64_t>(store.get_scalar(prefix + "/t")));
    const auto n = static_cast<std::size_t>(store.get_scalar(prefix + "/n"));
    auto& m = opt.first_moments();
    auto& v = opt.second_moments();
    m.resize(n);
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = store.template get_as<S>(prefix + "/m" + std::to_string(i)).col(0);
        v[i] = store.template get_as<S>(prefix + "/v" + std::to_string(i)).col(0);
    }
}

}  // namespace

template <class S>
TensorStore Learner<S>::to_store() const {
    TensorStore store;
    store.put_scalar("format/algorithm", static_cast<double>(algo_));
    store.put_scalar("format/obs_dim", kObsDim);
    store.put_scalar("format/action_dim", kActionDim);
    store_mlp(store, "policy/trunk", policy_.trunk);
    store.put("policy/mean_head/w", policy_.mean_head.w);
    store.put("policy/mean_head/b", Mat<S>(policy_.mean_head.b));
    store.put("policy/logstd_head/w", policy_.logstd_head.w);
    store.put("policy/logstd_head/b", Mat<S>(policy_.logstd_head.b));
    store_mlp(store, "q1", q1_);
    store_mlp(store, "q2", q2_);
    store_mlp(store, "tq1", tq1_);
    store_mlp(store, "tq2", tq2_);
    store.put_scalar("alpha/log", static_cast<double>(log_alpha_));
    store_adam(store, "opt/pi", opt_pi_);
    store_adam(store, "opt/q1", opt_q1_);
    store_adam(store, "opt/q2", opt_q2_);
    store_adam(store, "opt/alpha", opt_alpha_);
    return store;
}

template <class S>
void Learner<S>::load_store(const TensorStore& store) {
    load_mlp(store, "policy/trunk", policy_.trunk);
    policy_.mean_head.w = store.template get_as<S>("policy/mean_head/w");
    policy_.mean_head.b = store.template get_as<S>("policy/mean_head/b").col(0);
    policy_.logstd_head.w = store.template get_as<S>("policy/logstd_head/w");
    policy_.logstd_head.b = store.template get_as<S>("policy/logstd_head/b").col(0);
    load_mlp(store, "q1", q1_);
    load_mlp(store, "q2", q2_);
    load_mlp(store, "tq1", tq1_);
    load_mlp(store, "tq2", tq2_);
    log_alpha_ = static_cast<S>(store.get_scalar("alpha/log"));
    load_adam(store, "opt/pi", opt_pi_);
    load_adam(store, "opt/q1", opt_q1_);
    load_adam(store, "opt/q2", opt_q2_);
    load_adam(store, "opt/alpha", opt_alpha_);
}

template <class S>
void Learner<S>::save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    to_store().save(out);
}

template <class S>
Learner<S> Learner<S>::load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    const TensorStore store = TensorStore::load(in);
    const auto algo = static_cast<Algorithm>(static_cast<int>(store.get_scalar("format/algorithm")));
    Learner learner(algo, HyperParams{}, AblationFlags{}, 0);
    learner.load_store(store);
    return learner;
}

template struct Batch<float>;
template struct Batch<double>;
template Batch<float> make_batch(const std::vector<const Transition*>&, const ObsScales&);
template Batch<double> make_batch(const std::vector<const Transition*>&, const ObsScales&);
template Batch<float> concat_batches(const Batch<float>&, const Batch<float>&);
template Batch<double> concat_batches(const Batch<double>&, const Batch<double>&);
template Vec<float> q_target(const Mlp<float>&, const Mlp<float>&, const PolicyNet<float>&,
                             const Batch<float>&, float, float, Rng&);
template Vec<double> q_target(const Mlp<double>&, const Mlp<double>&, const PolicyNet<double>&,
                              const Batch<double>&, double, double, Rng&);
template float q_loss_and_grads(const Mlp<float>&, const Batch<float>&, const Vec<float>&,
                                Mlp<float>::Grads&);
template double q_loss_and_grads(const Mlp<double>&, const Batch<double>&, const Vec<double>&,
                                 Mlp<double>::Grads&);
template SacPolicyLossResult<float> sac_policy_loss_and_grads(const PolicyNet<float>&,
                                                              const Mlp<float>&, const Mlp<float>&,
                                                              const Mat<float>&, float, Rng&,
                                                              PolicyNet<float>::Grads&);
template SacPolicyLossResult<double> sac_policy_loss_and_grads(const PolicyNet<double>&,
                                                               const Mlp<double>&,
                                                               const Mlp<double>&,
                                                               const Mat<double>&, double, Rng&,
                                                               PolicyNet<double>::Grads&);
template Vec<float> qc_weights(const Mlp<float>&, const Mlp<float>&, const Mlp<float>&,
                               const Mlp<float>&, const Mat<float>&, const Mat<float>&,
                               const Mat<float>&, float);
template Vec<double> qc_weights(const Mlp<double>&, const Mlp<double>&, const Mlp<double>&,
                                const Mlp<double>&, const Mat<double>&, const Mat<double>&,
                                const Mat<double>&, double);
template QcoLossResult<float> qco_bc_loss_and_grads(const PolicyNet<float>&, const Mlp<float>&,
                                                    const Mlp<float>&, const Mlp<float>&,
                                                    const Mlp<float>&, const Mat<float>&,
                                                    const Mat<float>&, float, Rng&,
                                                    PolicyNet<float>::Grads&);
template QcoLossResult<double> qco_bc_loss_and_grads(const PolicyNet<double>&, const Mlp<double>&,
                                                     const Mlp<double>&, const Mlp<double>&,
                                                     const Mlp<double>&, const Mat<double>&,
                                                     const Mat<double>&, double, Rng&,
                                                     PolicyNet<double>::Grads&);
template float bcsac_bc_loss_and_grads(const PolicyNet<float>&, const Mat<float>&,
                                       const Mat<float>&, float, PolicyNet<float>::Grads&);
template double bcsac_bc_loss_and_grads(const PolicyNet<double>&, const Mat<double>&,
                                        const Mat<double>&, double, PolicyNet<double>::Grads&);
template float bc_loss_and_grads(const PolicyNet<float>&, const Mat<float>&, const Mat<float>&,
                                 PolicyNet<float>::Grads&);
template double bc_loss_and_grads(const PolicyNet<double>&, const Mat<double>&,
                                  const Mat<double>&, PolicyNet<double>::Grads&);
template std::pair<float, float> alpha_loss_and_grad(float, const Vec<float>&, float);
template std::pair<double, double> alpha_loss_and_grad(double, const Vec<double>&, double);
template class Learner<float>;
template class Learner<double>;

}  // namespace skid
