#pragma once

#include <cstdint>
#include <vector>

namespace weakspot {

// SplitMix64 finalizer (Steele, Lea & Flood 2014). All randomness in this
// library derives from it so that runs replay bit-identically on any
// platform: the mixer uses only 64-bit integer arithmetic.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Sequential SplitMix64 stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, bound). Lemire's multiply-shift with rejection; avoids
    // the implementation-defined behaviour of std::uniform_int_distribution.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    std::size_t next_index(std::size_t bound) {
        return static_cast<std::size_t>(next_below(bound));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // First k elements of a seeded permutation (partial Fisher-Yates).
    template <typename T>
    std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k) {
        if (k > pool.size()) k = pool.size();
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + next_index(pool.size() - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::uint64_t state_;
};

// Counter-based standard-normal draw keyed by (seed, counter). Uses the
// Irwin-Hall sum of 12 uniforms, which is exactly reproducible everywhere
// because it needs no transcendental libm calls. Good enough for synthetic
// measurement noise; not meant for statistics-grade sampling.
inline double keyed_standard_normal(std::uint64_t seed, std::uint64_t counter) {
    Rng rng(mix64(seed) ^ mix64(counter + 0x632be59bd9b4e019ULL));
    double sum = 0.0;
    for (int i = 0; i < 12; ++i) {
        sum += rng.next_double();
    }
    return sum - 6.0;
}

}  // namespace weakspot
