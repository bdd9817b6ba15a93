#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace skid {

// Deterministic random stream. mt19937_64 is fully specified by the standard,
// and all distributions below are implemented explicitly, so sequences are
// identical across compilers and standard libraries.
class Rng {
  public:
    Rng() : gen_(0x9e3779b97f4a7c15ull) {}
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer on [0, n). Rejection sampling, unbiased.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller, one spare cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    bool bernoulli(double p) { return uniform01() < p; }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
    for (char c : s) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= kFnvPrime;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Named sub-stream of a master seed. Every component of a run pulls its own
// stream so that changing one consumer never perturbs the others.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
    return splitmix64(splitmix64(master ^ fnv1a64(stream)) + index);
}

inline Rng derive_rng(std::uint64_t master, std::string_view stream, std::uint64_t index = 0) {
    return Rng(derive_seed(master, stream, index));
}

}  // namespace skid
