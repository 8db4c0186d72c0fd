#pragma once

// Portable deterministic randomness.
//
// Every random decision in the toolkit goes through Xoshiro256ss so that any
// implementation language can reproduce identical permutations:
//
//   splitmix64(x):  x += 0x9E3779B97F4A7C15
//                   z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
//                   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                   return z ^ (z >> 31)
//   seeding:        s[0..3] = four successive splitmix64 outputs from `seed`
//   next():         xoshiro256** (Blackman & Vigna)
//   below(n):       rejection sampling, reject r < (2^64 - n) mod n, return r mod n
//   derive_seed:    first splitmix64 output from state seed ^ fnv1a64(key)
//
// Test vectors (see tests/oracles/fisher_yates_oracle.py):
//   splitmix64 from state 0           -> 0xe220a8397b1dcdaf
//   xoshiro256** from state {1,2,3,4} -> 11520, 0, 1509978240, 1215971899390074240
//   Xoshiro256ss(42).next()           -> 0x15780b2e0c2ec716

#include <array>
#include <cstdint>
#include <string_view>

namespace shuftext {

struct ShuffleSeed {
    std::uint64_t value = 0;
    friend bool operator==(ShuffleSeed, ShuffleSeed) = default;
};

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Keyed child seed; used to give each example (or each pipeline stage) its
// own independent stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) {
    std::uint64_t state = seed ^ fnv1a64(key);
    return splitmix64_next(state);
}

class Xoshiro256ss {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256ss(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64_next(sm);
    }

    static Xoshiro256ss from_state(const std::array<std::uint64_t, 4>& state) {
        Xoshiro256ss g(0);
        g.s_ = state;
        return g;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() { return next(); }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform integer in [0, n). n must be nonzero.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

inline Xoshiro256ss substream(std::uint64_t seed, std::string_view key) {
    return Xoshiro256ss(derive_seed(seed, key));
}

}  // namespace shuftext
