#include "skid/replay.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "skid/errors.hpp"

namespace skid {

ReplayBuffer::ReplayBuffer(std::size_t capacity, double sigma_divisor)
    : capacity_(capacity), sigma_divisor_(sigma_divisor) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer capacity must be positive");
    if (sigma_divisor_ <= 0.0) throw std::invalid_argument("sigma divisor must be positive");
    ring_.resize(capacity_);
}

void ReplayBuffer::push(const Transition& t) {
    ring_[head_] = t;
    head_ = (head_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
}

const Transition& ReplayBuffer::by_age(std::size_t age) const {
    if (age >= size_) throw std::out_of_range("ReplayBuffer::by_age");
    const std::size_t newest = (head_ + capacity_ - 1) % capacity_;
    return ring_[(newest + capacity_ - age % capacity_) % capacity_];
}

std::size_t ReplayBuffer::sample_age(Rng& rng) const {
    if (size_ == 0) throw std::logic_error("sampling from an empty replay buffer");
    const double a = std::floor(std::abs(rng.normal()) * sigma());
    if (a >= static_cast<double>(size_ - 1)) return size_ - 1;
    return static_cast<std::size_t>(a);
}

std::vector<const Transition*> ReplayBuffer::sample_fer(std::size_t n, Rng& rng) const {
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(&by_age(sample_age(rng)));
    return out;
}

double episode_reward(const Episode& e) {
    double r = 0.0;
    for (const auto& t : e) r += t.reward;
    return r;
}

void DemoDataset::add_episode(Episode episode) {
    const double r_epi = episode_reward(episode);
    episodes_.push_back(std::move(episode));
    const double n = static_cast<double>(episodes_.size());
    mean_episode_reward_ = (mean_episode_reward_ * (n - 1.0) + r_epi) / n;
    for (const auto& t : episodes_.back()) flat_.push_back(&t);
}

bool DemoDataset::sddu_consider(const Episode& episode, double r_epi) {
    // Strict inequality: ties are rejected. An empty dataset admits anything.
    if (!episodes_.empty() && !(r_epi > mean_episode_reward_)) return false;
    episodes_.push_back(episode);
    const double n = static_cast<double>(episodes_.size());
    mean_episode_reward_ = (mean_episode_reward_ * (n - 1.0) + r_epi) / n;
    for (const auto& t : episodes_.back()) flat_.push_back(&t);
    return true;
}

double DemoDataset::mean_episode_reward() const {
    if (episodes_.empty()) throw std::logic_error("mean episode reward of an empty dataset");
    return mean_episode_reward_;
}

double DemoDataset::recompute_mean_episode_reward() const {
    if (episodes_.empty()) throw std::logic_error("mean episode reward of an empty dataset");
    double total = 0.0;
    for (const auto& e : episodes_) total += episode_reward(e);
    return total / static_cast<double>(episodes_.size());
}

std::vector<const Transition*> DemoDataset::sample_uniform(std::size_t n, Rng& rng) const {
    if (flat_.empty()) throw std::logic_error("sampling from an empty demonstration dataset");
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(flat_[rng.uniform_int(flat_.size())]);
    return out;
}

void DemoDataset::reindex() {
    flat_.clear();
    for (const auto& e : episodes_) {
        for (const auto& t : e) flat_.push_back(&t);
    }
}

namespace {

constexpr char kMagic[8] = {'S', 'K', 'I', 'D', 'D', 'E', 'M', 'O'};
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

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(out, bits);
}

double read_f64(std::istream& in) {
    const std::uint64_t bits = read_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void DemoDataset::save(std::ostream& out) const {
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kVersion);
    write_u32(out, kObsDim);
    write_u32(out, kActionDim);
    write_u64(out, episodes_.size());
    write_f64(out, mean_episode_reward_);
    for (const auto& e : episodes_) {
        write_u64(out, e.size());
        for (const auto& t : e) {
            for (double v : t.obs) write_f64(out, v);
            for (double v : t.action) write_f64(out, v);
            write_f64(out, t.reward);
            for (double v : t.next_obs) write_f64(out, v);
            out.put(t.done ? 1 : 0);
        }
    }
    if (!out) throw IoError("failed to write demonstration dataset");
}

DemoDataset DemoDataset::load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IoError("not a demonstration dataset file");
    }
    if (read_u32(in) != kVersion) throw IoError("unsupported demonstration dataset version");
    if (read_u32(in) != kObsDim || read_u32(in) != kActionDim) {
        throw IoError("demonstration dataset dimension mismatch");
    }
    const std::uint64_t episode_count = read_u64(in);
    const double mean = read_f64(in);
    DemoDataset ds;
    ds.episodes_.reserve(episode_count);
    for (std::uint64_t i = 0; i < episode_count; ++i) {
        const std::uint64_t steps = read_u64(in);
        Episode e(steps);
        for (auto& t : e) {
            for (double& v : t.obs) v = read_f64(in);
            for (double& v : t.action) v = read_f64(in);
            t.reward = read_f64(in);
            for (double& v : t.next_obs) v = read_f64(in);
            t.done = in.get() != 0;
        }
        ds.episodes_.push_back(std::move(e));
    }
    if (!in) throw IoError("truncated demonstration dataset");
    ds.mean_episode_reward_ = mean;
    ds.reindex();
    return ds;
}

void DemoDataset::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    save(out);
}

DemoDataset DemoDataset::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    return load(in);
}

}  // namespace skid
