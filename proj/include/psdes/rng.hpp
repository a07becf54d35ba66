#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace psdes {

// One mixing round of splitmix64. Used to derive independent stream seeds
// from a master seed plus a list of stream identifiers, so that adding or
// reordering workers never changes the draws any single stream produces.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Ids>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id, Ids... rest) {
    return derive_seed(splitmix64(seed ^ splitmix64(id)), static_cast<std::uint64_t>(rest)...);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seeded random stream. Wraps std::mt19937_64 (whose output sequence is
// fully specified by the standard) and hand-rolls the distributions, which
// the standard leaves implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Unbiased draw in [0, n) by rejection.
    std::size_t uniform_below(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform_real() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller, one value per call.
    double normal() {
        double u1;
        do {
            u1 = uniform_real();
        } while (u1 <= 0.0);
        const double u2 = uniform_real();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[uniform_below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace psdes
