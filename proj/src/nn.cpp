#include "skid/nn.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "skid/errors.hpp"

namespace skid {

template <class S>
Mlp<S> Mlp<S>::random(const std::vector<int>& widths, Rng& rng, bool rectified_output) {
    if (widths.size() < 2) throw std::invalid_argument("Mlp needs at least two widths");
    Mlp net;
    net.rectified_output = rectified_output;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        Layer l;
        const int fan_in = widths[i];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        l.w = Mat<S>(widths[i + 1], widths[i]);
        l.b = Vec<S>(widths[i + 1]);
        for (int r = 0; r < l.w.rows(); ++r) {
            for (int c = 0; c < l.w.cols(); ++c) {
                l.w(r, c) = static_cast<S>(rng.uniform(-bound, bound));
            }
        }
        for (int r = 0; r < l.b.size(); ++r) l.b(r) = static_cast<S>(rng.uniform(-bound, bound));
        net.layers.push_back(std::move(l));
    }
    return net;
}

template <class S>
std::size_t Mlp<S>::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
}

template <class S>
Mat<S> Mlp<S>::forward(const Mat<S>& x, Cache* cache) const {
    if (cache) {
        cache->act.clear();
        cache->act.reserve(layers.size() + 1);
        cache->act.push_back(x);
    }
    Mat<S> h = x;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        h = (layers[i].w * h).colwise() + layers[i].b;
        const bool rectify = (i + 1 < layers.size()) || rectified_output;
        if (rectify) h = h.cwiseMax(S(0));
        if (cache) cache->act.push_back(h);
    }
    return h;
}

template <class S>
typename Mlp<S>::Grads Mlp<S>::Grads::zeros_like(const Mlp& net) {
    Grads g;
    g.layers.reserve(net.layers.size());
    for (const auto& l : net.layers) {
        g.layers.push_back({Mat<S>::Zero(l.w.rows(), l.w.cols()), Vec<S>::Zero(l.b.size())});
    }
    return g;
}

template <class S>
void Mlp<S>::Grads::zero() {
    for (auto& l : layers) {
        l.w.setZero();
        l.b.setZero();
    }
}

template <class S>
void Mlp<S>::backward(const Cache& cache, const Mat<S>& dy, Grads& grads, Mat<S>* dx) const {
    if (cache.act.size() != layers.size() + 1) {
        throw std::logic_error("Mlp::backward called with a stale cache");
    }
    Mat<S> delta = dy;
    for (std::size_t i = layers.size(); i-- > 0;) {
        const bool rectified = (i + 1 < layers.size()) || rectified_output;
        if (rectified) {
            // Cached post-activation > 0 marks the active units.
            delta = delta.cwiseProduct(
                (cache.act[i + 1].array() > S(0)).template cast<S>().matrix());
        }
        grads.layers[i].w.noalias() += delta * cache.act[i].transpose();
        grads.layers[i].b += delta.rowwise().sum();
        if (i > 0 || dx) {
            Mat<S> prev = layers[i].w.transpose() * delta;
            if (i == 0) {
                if (dx) *dx = std::move(prev);
            } else {
                delta = std::move(prev);
            }
        }
    }
}

template <class S>
Mat<S> Mlp<S>::backward_input(const Cache& cache, const Mat<S>& dy) const {
    if (cache.act.size() != layers.size() + 1) {
        throw std::logic_error("Mlp::backward_input called with a stale cache");
    }
    Mat<S> delta = dy;
    for (std::size_t i = layers.size(); i-- > 0;) {
        const bool rectified = (i + 1 < layers.size()) || rectified_output;
        if (rectified) {
            delta = delta.cwiseProduct(
                (cache.act[i + 1].array() > S(0)).template cast<S>().matrix());
        }
        delta = layers[i].w.transpose() * delta;
    }
    return delta;
}

template <class S>
TensorRef<S> tensor_ref(Mat<S>& p, const Mat<S>& g) {
    return {p.data(), g.data(), p.size()};
}

template <class S>
TensorRef<S> tensor_ref(Vec<S>& p, const Vec<S>& g) {
    return {p.data(), g.data(), p.size()};
}

template <class S>
std::vector<TensorRef<S>> tensor_refs(Mlp<S>& net, const typename Mlp<S>::Grads& grads) {
    std::vector<TensorRef<S>> refs;
    refs.reserve(net.layers.size() * 2);
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        refs.push_back({net.layers[i].w.data(), grads.layers[i].w.data(), net.layers[i].w.size()});
        refs.push_back({net.layers[i].b.data(), grads.layers[i].b.data(), net.layers[i].b.size()});
    }
    return refs;
}

template <class S>
void Adam<S>::step(const std::vector<TensorRef<S>>& tensors) {
    if (m_.empty()) {
        for (const auto& t : tensors) {
            m_.push_back(Vec<S>::Zero(t.size));
            v_.push_back(Vec<S>::Zero(t.size));
        }
    }
    if (m_.size() != tensors.size()) throw std::logic_error("Adam: tensor count changed");
    ++t_;
    const S bc1 = S(1) - std::pow(beta1_, S(t_));
    const S bc2 = S(1) - std::pow(beta2_, S(t_));
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const auto& t = tensors[i];
        if (m_[i].size() != t.size) throw std::logic_error("Adam: tensor shape changed");
        Eigen::Map<Vec<S>> p(t.param, t.size);
        Eigen::Map<const Vec<S>> g(t.grad, t.size);
        m_[i] = beta1_ * m_[i] + (S(1) - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (S(1) - beta2_) * g.cwiseProduct(g);
        p.array() -= lr_ * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + eps_);
    }
}

template <class S>
void polyak_update(Mlp<S>& target, const Mlp<S>& online, S tau) {
    if (target.layers.size() != online.layers.size()) {
        throw std::logic_error("polyak_update: layer count mismatch");
    }
    for (std::size_t i = 0; i < target.layers.size(); ++i) {
        auto& t = target.layers[i];
        const auto& o = online.layers[i];
        if (t.w.rows() != o.w.rows() || t.w.cols() != o.w.cols()) {
            throw std::logic_error("polyak_update: shape mismatch");
        }
        t.w = tau * o.w + (S(1) - tau) * t.w;
        t.b = tau * o.b + (S(1) - tau) * t.b;
    }
}

template struct Mlp<float>;
template struct Mlp<double>;
template class Adam<float>;
template class Adam<double>;
template TensorRef<float> tensor_ref(Mat<float>&, const Mat<float>&);
template TensorRef<double> tensor_ref(Mat<double>&, const Mat<double>&);
template TensorRef<float> tensor_ref(Vec<float>&, const Vec<float>&);
template TensorRef<double> tensor_ref(Vec<double>&, const Vec<double>&);
template std::vector<TensorRef<float>> tensor_refs(Mlp<float>&, const Mlp<float>::Grads&);
template std::vector<TensorRef<double>> tensor_refs(Mlp<double>&, const Mlp<double>::Grads&);
template void polyak_update<float>(Mlp<float>&, const Mlp<float>&, float);
template void polyak_update<double>(Mlp<double>&, const Mlp<double>&, double);

namespace {

constexpr char kMagic[8] = {'S', 'K', 'I', 'D', 'T', 'E', 'N', 'S'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void TensorStore::put(const std::string& name, const Mat<double>& value) {
    tensors_[name] = value;
}

void TensorStore::put_scalar(const std::string& name, double value) {
    Mat<double> m(1, 1);
    m(0, 0) = value;
    tensors_[name] = m;
}

const Mat<double>& TensorStore::get(const std::string& name) const {
    const auto it = tensors_.find(name);
    if (it == tensors_.end()) throw IoError("tensor not found: " + name);
    return it->second;
}

double TensorStore::get_scalar(const std::string& name) const {
    const auto& m = get(name);
    if (m.size() != 1) throw IoError("tensor is not a scalar: " + name);
    return m(0, 0);
}

bool TensorStore::contains(const std::string& name) const {
    return tensors_.count(name) != 0;
}

void TensorStore::save(std::ostream& out) const {
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kVersion);
    write_u32(out, static_cast<std::uint32_t>(tensors_.size()));
    for (const auto& [name, m] : tensors_) {
        write_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(out, static_cast<std::uint32_t>(m.rows()));
        write_u32(out, static_cast<std::uint32_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            for (Eigen::Index r = 0; r < m.rows(); ++r) write_f64(out, m(r, c));
        }
    }
    if (!out) throw IoError("failed to write tensor store");
}

TensorStore TensorStore::load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IoError("not a tensor store file");
    }
    const std::uint32_t version = read_u32(in);
    if (version != kVersion) throw IoError("unsupported tensor store version");
    const std::uint32_t count = read_u32(in);
    TensorStore store;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = read_u32(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const std::uint32_t rows = read_u32(in);
        const std::uint32_t cols = read_u32(in);
        Mat<double> m(rows, cols);
        for (std::uint32_t c = 0; c < cols; ++c) {
            for (std::uint32_t r = 0; r < rows; ++r) m(r, c) = read_f64(in);
        }
        if (!in) throw IoError("truncated tensor store");
        store.tensors_[name] = std::move(m);
    }
    return store;
}

}  // namespace skid
