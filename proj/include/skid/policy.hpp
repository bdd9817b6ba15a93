#pragma once

#include "skid/nn.hpp"
#include "skid/observation.hpp"

namespace skid {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;

// Squashed-Gaussian policy: a rectified trunk feeding linear mean and
// log-std heads, actions squashed through tanh into (-1, 1)^2.
template <class S>
struct PolicyNet {
    Mlp<S> trunk;  // rectified output
    typename Mlp<S>::Layer mean_head;
    typename Mlp<S>::Layer logstd_head;

    static PolicyNet random(int obs_dim, int action_dim, const std::vector<int>& hidden, Rng& rng);

    int obs_dim() const { return trunk.in_dim(); }
    int action_dim() const { return static_cast<int>(mean_head.w.rows()); }

    struct Grads {
        typename Mlp<S>::Grads trunk;
        typename Mlp<S>::Layer mean_head;
        typename Mlp<S>::Layer logstd_head;

        static Grads zeros_like(const PolicyNet& net);
        void zero();
    };

    // Forward results plus everything the backward pass needs.
    struct Cache {
        typename Mlp<S>::Cache trunk;
        Mat<S> features;     // trunk output
        Mat<S> mean;         // action_dim x B
        Mat<S> logstd_raw;   // before clamping
        Mat<S> logstd;       // clamped
        Mat<S> std;          // exp(logstd)
    };

    void forward(const Mat<S>& obs, Cache& cache) const;

    // Reparameterized sample: eps is filled with standard normals from rng,
    // action = tanh(mean + std * eps), log_prob includes the tanh
    // change-of-variables correction.
    struct Sample {
        Mat<S> eps;
        Mat<S> z;       // pre-squash
        Mat<S> action;  // tanh(z)
        Vec<S> log_prob;
    };

    Sample sample(const Cache& cache, Rng& rng) const;

    // Backpropagates dL/daction and dL/dlog_prob of a reparameterized
    // sample into parameter gradients.
    void backward_sample(const Cache& cache, const Sample& sample, const Mat<S>& d_action,
                         const Vec<S>& d_log_prob, Grads& grads) const;

    Mat<S> deterministic_action(const Mat<S>& obs) const;

    // Log-density of given actions (for the log-prob form of behavior
    // cloning). Actions are clipped to +-(1 - 1e-6) before the atanh.
    Vec<S> log_prob_of(const Cache& cache, const Mat<S>& actions, Mat<S>* z_out = nullptr) const;

    // Backward of mean/log-std gradients of log_prob_of.
    void backward_log_prob_of(const Cache& cache, const Mat<S>& z, const Vec<S>& d_log_prob,
                              Grads& grads) const;

    // Backward for losses expressed directly on tanh(mean) (plain BC).
    void backward_mean_action(const Cache& cache, const Mat<S>& d_action, Grads& grads) const;

    std::vector<TensorRef<S>> tensor_refs(Grads& grads);
    std::vector<const Mat<S>*> weight_list() const;
};

// Q network over concatenated (obs, action) columns.
template <class S>
Mat<S> q_input(const Mat<S>& obs, const Mat<S>& actions);

}  // namespace skid
