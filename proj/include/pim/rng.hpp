#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pim {

inline uint64_t splitmix64(uint64_t &state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable 64-bit combine; used for per-purpose substreams and per-trial seeds
// so that grids can be extended without perturbing existing cells.
inline uint64_t mix_seed(std::initializer_list<uint64_t> parts) {
    uint64_t state = 0x243f6a8885a308d3ULL;  // arbitrary nonzero start
    uint64_t out = 0;
    for (uint64_t p : parts) {
        state ^= p;
        out = splitmix64(state);
    }
    return out;
}

// Deterministic uniform-source wrapper. All variate algorithms are spelled
// out here instead of using std::*_distribution, whose outputs differ across
// standard libraries; mt19937_64 itself is pinned by the standard.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }

    // uniform on [0,1) with 53-bit resolution
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // integer in [0, n)
    uint64_t below(uint64_t n) {
        // rejection sampling to avoid modulo bias
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Knuth multiplication method; fine for the small rates used here.
    int poisson(double lambda) {
        const double floor_p = std::exp(-lambda);
        int k = 0;
        double prod = 1.0;
        do {
            prod *= uniform01();
            ++k;
        } while (prod > floor_p);
        return k - 1;
    }

    // sum of n Bernoulli(p) draws; n stays tiny (at most M_bar + 1)
    int binomial(int n, double p) {
        int hits = 0;
        for (int i = 0; i < n; ++i) {
            if (uniform01() < p) ++hits;
        }
        return hits;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace pim
