#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace okrig {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stable per-repeat seed: a pure function of (master, index), so adding
// repeats never changes the streams of earlier ones.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x5851F42D4C957F2DULL));
}

// Seeded stream with explicit, stdlib-independent integer draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)), normal_(0.0, 1.0) {}

    std::uint64_t next_u64() { return eng_(); }

    // Unbiased-to-2^-64 draw in [0, bound) (Lemire multiply-shift).
    std::uint64_t bounded(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() { return normal_(eng_); }

    int bernoulli(double p) { return uniform() < p ? 1 : 0; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_;
};

}  // namespace okrig
