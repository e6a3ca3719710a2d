#pragma once

// Deterministic seeded RNG (splitmix64) so every randomized suite is
// reproducible bit-for-bit across platforms.

#include <cstdint>

namespace parsec {

struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in [0, n)
    uint64_t uniform(uint64_t n) { return n ? next() % n : 0; }
    long range(long lo, long hi) { return lo + static_cast<long>(uniform(static_cast<uint64_t>(hi - lo + 1))); }
    bool coin() { return next() & 1; }
};

}  // namespace parsec
