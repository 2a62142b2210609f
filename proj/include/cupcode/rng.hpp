#pragma once

// Seeded randomness. All stochastic behavior in the library flows through
// Rng so that reports are byte-identical across platforms. mt19937_64 has a
// fully specified output sequence; std::uniform_int_distribution does not,
// so bounded draws are done by rejection here instead.

#include <cstdint>
#include <random>

namespace cupcode {

class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t u64() { return eng_(); }

    bool bit() { return eng_() & 1; }

    // Uniform in [0, n), n >= 1.
    uint64_t below(uint64_t n) {
        if (n == 0)
            return 0;
        uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= lim);
        return x % n;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace cupcode
