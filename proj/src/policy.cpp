#include "skid/policy.hpp"

#include <cmath>

namespace skid {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)

// log(1 - tanh(z)^2) = 2 * (log 2 - z - softplus(-2z)), stable for large |z|.
template <class S>
S log_one_minus_tanh_sq(S z) {
    const S x = S(-2) * z;
    const S softplus = x > S(0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return S(2) * (S(M_LN2) - z - softplus);
}

}  // namespace

template <class S>
PolicyNet<S> PolicyNet<S>::random(int obs_dim, int action_dim, const std::vector<int>& hidden,
                                  Rng& rng) {
    PolicyNet net;
    std::vector<int> widths;
    widths.push_back(obs_dim);
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    net.trunk = Mlp<S>::random(widths, rng, /*rectified_output=*/true);
    const int feat = widths.back();
    auto head = [&](void) {
        typename Mlp<S>::Layer l;
        const double bound = 1.0 / std::sqrt(static_cast<double>(feat));
        l.w = Mat<S>(action_dim, feat);
        l.b = Vec<S>(action_dim);
        for (int r = 0; r < l.w.rows(); ++r) {
            for (int c = 0; c < l.w.cols(); ++c) {
                l.w(r, c) = static_cast<S>(rng.uniform(-bound, bound));
            }
        }
        for (int r = 0; r < l.b.size(); ++r) l.b(r) = static_cast<S>(rng.uniform(-bound, bound));
        return l;
    };
    net.mean_head = head();
    net.logstd_head = head();
    return net;
}

template <class S>
typename PolicyNet<S>::Grads PolicyNet<S>::Grads::zeros_like(const PolicyNet& net) {
    Grads g;
    g.trunk = Mlp<S>::Grads::zeros_like(net.trunk);
    g.mean_head.w = Mat<S>::Zero(net.mean_head.w.rows(), net.mean_head.w.cols());
    g.mean_head.b = Vec<S>::Zero(net.mean_head.b.size());
    g.logstd_head.w = Mat<S>::Zero(net.logstd_head.w.rows(), net.logstd_head.w.cols());
    g.logstd_head.b = Vec<S>::Zero(net.logstd_head.b.size());
    return g;
}

template <class S>
void PolicyNet<S>::Grads::zero() {
    trunk.zero();
    mean_head.w.setZero();
    mean_head.b.setZero();
    logstd_head.w.setZero();
    logstd_head.b.setZero();
}

template <class S>
void PolicyNet<S>::forward(const Mat<S>& obs, Cache& cache) const {
    cache.features = trunk.forward(obs, &cache.trunk);
    cache.mean = (mean_head.w * cache.features).colwise() + mean_head.b;
    cache.logstd_raw = (logstd_head.w * cache.features).colwise() + logstd_head.b;
    cache.logstd =
        cache.logstd_raw.cwiseMax(S(kLogStdMin)).cwiseMin(S(kLogStdMax));
    cache.std = cache.logstd.array().exp().matrix();
}

template <class S>
typename PolicyNet<S>::Sample PolicyNet<S>::sample(const Cache& cache, Rng& rng) const {
    const Eigen::Index dim = cache.mean.rows();
    const Eigen::Index batch = cache.mean.cols();
    Sample s;
    s.eps = Mat<S>(dim, batch);
    for (Eigen::Index c = 0; c < batch; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) s.eps(r, c) = static_cast<S>(rng.normal());
    }
    s.z = cache.mean + cache.std.cwiseProduct(s.eps);
    s.action = s.z.array().tanh().matrix();
    s.log_prob = Vec<S>::Zero(batch);
    for (Eigen::Index c = 0; c < batch; ++c) {
        S lp = S(0);
        for (Eigen::Index r = 0; r < dim; ++r) {
            lp += -cache.logstd(r, c) - S(0.5) * s.eps(r, c) * s.eps(r, c) - S(kHalfLog2Pi) -
                  log_one_minus_tanh_sq(s.z(r, c));
        }
        s.log_prob(c) = lp;
    }
    return s;
}

template <class S>
void PolicyNet<S>::backward_sample(const Cache& cache, const Sample& sample, const Mat<S>& d_action,
                                   const Vec<S>& d_log_prob, Grads& grads) const {
    // z = mean + std.*eps with eps fixed, action = tanh(z),
    // log_prob = sum(-logstd - eps^2/2 - c - log(1 - tanh(z)^2)).
    // d log_prob / dz = 2*tanh(z); d action / dz = 1 - tanh(z)^2.
    const Mat<S> one_minus_a2 =
        (Mat<S>::Ones(sample.action.rows(), sample.action.cols()) -
         sample.action.cwiseProduct(sample.action));
    Mat<S> dz = d_action.cwiseProduct(one_minus_a2);
    dz += (S(2) * sample.action) * d_log_prob.asDiagonal();

    // mean receives dz; logstd receives dz.*std.*eps - d_log_prob.
    Mat<S> d_mean = dz;
    Mat<S> d_logstd = dz.cwiseProduct(cache.std.cwiseProduct(sample.eps));
    d_logstd.array().rowwise() -= d_log_prob.transpose().array();

    // Clamp kills the gradient outside the active range.
    const Mat<S> clamp_mask =
        ((cache.logstd_raw.array() > S(kLogStdMin)) && (cache.logstd_raw.array() < S(kLogStdMax)))
            .template cast<S>()
            .matrix();
    d_logstd = d_logstd.cwiseProduct(clamp_mask);

    grads.mean_head.w.noalias() += d_mean * cache.features.transpose();
    grads.mean_head.b += d_mean.rowwise().sum();
    grads.logstd_head.w.noalias() += d_logstd * cache.features.transpose();
    grads.logstd_head.b += d_logstd.rowwise().sum();

    const Mat<S> d_features =
        mean_head.w.transpose() * d_mean + logstd_head.w.transpose() * d_logstd;
    trunk.backward(cache.trunk, d_features, grads.trunk);
}

template <class S>
Mat<S> PolicyNet<S>::deterministic_action(const Mat<S>& obs) const {
    Cache cache;
    forward(obs, cache);
    return cache.mean.array().tanh().matrix();
}

template <class S>
Vec<S> PolicyNet<S>::log_prob_of(const Cache& cache, const Mat<S>& actions, Mat<S>* z_out) const {
    const Eigen::Index dim = cache.mean.rows();
    const Eigen::Index batch = cache.mean.cols();
    const S clip = S(1) - S(1e-6);
    Mat<S> z(dim, batch);
    Vec<S> lp = Vec<S>::Zero(batch);
    for (Eigen::Index c = 0; c < batch; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            const S a = std::clamp(actions(r, c), -clip, clip);
            const S zz = std::atanh(a);
            z(r, c) = zz;
            const S u = (zz - cache.mean(r, c)) / cache.std(r, c);
            lp(c) += -cache.logstd(r, c) - S(0.5) * u * u - S(kHalfLog2Pi) -
                     std::log(S(1) - a * a);
        }
    }
    if (z_out) *z_out = std::move(z);
    return lp;
}

template <class S>
void PolicyNet<S>::backward_log_prob_of(const Cache& cache, const Mat<S>& z,
                                        const Vec<S>& d_log_prob, Grads& grads) const {
    // With z fixed: d lp / d mean = u / std, d lp / d logstd = u^2 - 1,
    // where u = (z - mean) / std.
    const Mat<S> u = (z - cache.mean).cwiseQuotient(cache.std);
    Mat<S> d_mean = u.cwiseQuotient(cache.std) * d_log_prob.asDiagonal();
    Mat<S> d_logstd =
        (u.cwiseProduct(u) - Mat<S>::Ones(u.rows(), u.cols())) * d_log_prob.asDiagonal();

    const Mat<S> clamp_mask =
        ((cache.logstd_raw.array() > S(kLogStdMin)) && (cache.logstd_raw.array() < S(kLogStdMax)))
            .template cast<S>()
            .matrix();
    d_logstd = d_logstd.cwiseProduct(clamp_mask);

    grads.mean_head.w.noalias() += d_mean * cache.features.transpose();
    grads.mean_head.b += d_mean.rowwise().sum();
    grads.logstd_head.w.noalias() += d_logstd * cache.features.transpose();
    grads.logstd_head.b += d_logstd.rowwise().sum();

    const Mat<S> d_features =
        mean_head.w.transpose() * d_mean + logstd_head.w.transpose() * d_logstd;
    trunk.backward(cache.trunk, d_features, grads.trunk);
}

template <class S>
void PolicyNet<S>::backward_mean_action(const Cache& cache, const Mat<S>& d_action,
                                        Grads& grads) const {
    const Mat<S> tanh_mean = cache.mean.array().tanh().matrix();
    const Mat<S> d_mean = d_action.cwiseProduct(
        Mat<S>::Ones(tanh_mean.rows(), tanh_mean.cols()) - tanh_mean.cwiseProduct(tanh_mean));
    grads.mean_head.w.noalias() += d_mean * cache.features.transpose();
    grads.mean_head.b += d_mean.rowwise().sum();
    const Mat<S> d_features = mean_head.w.transpose() * d_mean;
    trunk.backward(cache.trunk, d_features, grads.trunk);
}

template <class S>
std::vector<TensorRef<S>> PolicyNet<S>::tensor_refs(Grads& grads) {
    std::vector<TensorRef<S>> refs = skid::tensor_refs(trunk, grads.trunk);
    refs.push_back(tensor_ref(mean_head.w, grads.mean_head.w));
    refs.push_back(tensor_ref(mean_head.b, grads.mean_head.b));
    refs.push_back(tensor_ref(logstd_head.w, grads.logstd_head.w));
    refs.push_back(tensor_ref(logstd_head.b, grads.logstd_head.b));
    return refs;
}

template <class S>
std::vector<const Mat<S>*> PolicyNet<S>::weight_list() const {
    std::vector<const Mat<S>*> w;
    for (const auto& l : trunk.layers) w.push_back(&l.w);
    w.push_back(&mean_head.w);
    w.push_back(&logstd_head.w);
    return w;
}

template <class S>
Mat<S> q_input(const Mat<S>& obs, const Mat<S>& actions) {
    Mat<S> x(obs.rows() + actions.rows(), obs.cols());
    x.topRows(obs.rows()) = obs;
    x.bottomRows(actions.rows()) = actions;
    return x;
}

template struct PolicyNet<float>;
template struct PolicyNet<double>;
template Mat<float> q_input(const Mat<float>&, const Mat<float>&);
template Mat<double> q_input(const Mat<double>&, const Mat<double>&);

}  // namespace skid
