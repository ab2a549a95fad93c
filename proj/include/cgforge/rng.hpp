#ifndef CGFORGE_RNG_HPP
#define CGFORGE_RNG_HPP

#include <cstdint>
#include <random>

namespace cgforge {

// mt19937_64 output is fixed by the standard; the distributions are not.
// Everything that must be reproducible across toolchains draws through here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, bound), bound >= 1. Lemire's nearly-divisionless method.
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = -bound % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace cgforge

#endif  // CGFORGE_RNG_HPP
