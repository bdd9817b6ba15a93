#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "skid/rng.hpp"

namespace skid {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Column-batched multilayer perceptron with rectifier hidden units. The
// output layer is linear unless `rectified_output` is set (used by policy
// trunks whose heads attach on top).
template <class S>
struct Mlp {
    struct Layer {
        Mat<S> w;
        Vec<S> b;
    };
    std::vector<Layer> layers;
    bool rectified_output = false;

    static Mlp random(const std::vector<int>& widths, Rng& rng, bool rectified_output = false);

    int in_dim() const { return static_cast<int>(layers.front().w.cols()); }
    int out_dim() const { return static_cast<int>(layers.back().w.rows()); }
    std::size_t param_count() const;

    // Activations kept for the backward pass; act[0] is the input.
    struct Cache {
        std::vector<Mat<S>> act;
    };

    Mat<S> forward(const Mat<S>& x, Cache* cache = nullptr) const;

    struct Grads {
        std::vector<Layer> layers;

        static Grads zeros_like(const Mlp& net);
        void zero();
    };

    // Accumulates parameter gradients into `grads` and, when `dx` is given,
    // writes the gradient with respect to the input.
    void backward(const Cache& cache, const Mat<S>& dy, Grads& grads, Mat<S>* dx = nullptr) const;

    // Gradient with respect to the input only; parameters untouched.
    Mat<S> backward_input(const Cache& cache, const Mat<S>& dy) const;
};

// Parameter tensor paired with its gradient, shape-erased.
template <class S>
struct TensorRef {
    S* param = nullptr;
    const S* grad = nullptr;
    Eigen::Index size = 0;
};

template <class S>
TensorRef<S> tensor_ref(Mat<S>& p, const Mat<S>& g);
template <class S>
TensorRef<S> tensor_ref(Vec<S>& p, const Vec<S>& g);

// Refs over every parameter of `net`, paired with `grads` in layer order.
template <class S>
std::vector<TensorRef<S>> tensor_refs(Mlp<S>& net, const typename Mlp<S>::Grads& grads);

// Adaptive-moment parameter updates over a flat list of tensors.
template <class S>
class Adam {
  public:
    Adam() = default;
    Adam(S lr, S beta1 = S(0.9), S beta2 = S(0.999), S eps = S(1e-8))
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(const std::vector<TensorRef<S>>& tensors);

    S lr() const { return lr_; }
    std::int64_t steps_taken() const { return t_; }

    // Serialized alongside checkpoints.
    std::vector<Vec<S>>& first_moments() { return m_; }
    std::vector<Vec<S>>& second_moments() { return v_; }
    const std::vector<Vec<S>>& first_moments() const { return m_; }
    const std::vector<Vec<S>>& second_moments() const { return v_; }
    void set_steps_taken(std::int64_t t) { t_ = t; }

  private:
    S lr_ = S(3e-4);
    S beta1_ = S(0.9);
    S beta2_ = S(0.999);
    S eps_ = S(1e-8);
    std::int64_t t_ = 0;
    std::vector<Vec<S>> m_;
    std::vector<Vec<S>> v_;
};

// target <- tau * online + (1 - tau) * target, elementwise.
template <class S>
void polyak_update(Mlp<S>& target, const Mlp<S>& online, S tau);

// Named-tensor container backing the checkpoint and dataset files. All
// values are stored as little-endian 64-bit floats regardless of the
// in-memory scalar, so files from float and double builds are identical
// whenever the values are representable.
class TensorStore {
  public:
    void put(const std::string& name, const Mat<double>& value);
    void put_scalar(const std::string& name, double value);

    const Mat<double>& get(const std::string& name) const;
    double get_scalar(const std::string& name) const;
    bool contains(const std::string& name) const;

    void save(std::ostream& out) const;
    static TensorStore load(std::istream& in);

    template <class S>
    void put(const std::string& name, const Mat<S>& value) {
        put(name, Mat<double>(value.template cast<double>()));
    }
    template <class S>
    Mat<S> get_as(const std::string& name) const {
        return get(name).cast<S>();
    }

  private:
    std::map<std::string, Mat<double>> tensors_;
};

}  // namespace skid
