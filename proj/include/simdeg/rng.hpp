#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "simdeg/errors.hpp"

namespace simdeg {

// splitmix64: tiny, bit-exact on every platform, good enough statistical
// quality for instance sampling. State advances by the golden-gamma constant.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform draw in [0, bound) by rejection on the low bits: discard draws
    // below 2^64 mod bound so that the final modulo is unbiased.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw parameter_error("SplitMix64::below: bound must be positive");
        std::uint64_t min = (0 - bound) % bound;  // 2^64 mod bound
        std::uint64_t r;
        do {
            r = next();
        } while (r < min);
        return r % bound;
    }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

// count distinct values uniformly from {0, ..., population-1}, returned in
// ascending order. Rejection of repeats keeps the subset distribution uniform;
// sorting erases the draw order so only the set matters.
inline std::vector<std::uint64_t> sample_distinct_sorted(SplitMix64& rng,
                                                         std::uint64_t population,
                                                         std::uint64_t count) {
    if (count > population)
        throw parameter_error("sample_distinct_sorted: count exceeds population");
    std::vector<std::uint64_t> out;
    out.reserve(count);
    while (out.size() < count) {
        std::uint64_t v = rng.below(population);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace simdeg
