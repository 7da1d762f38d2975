#ifndef OSOS_RNG_HPP
#define OSOS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace osos {

// Counter-based 64-bit generator (splitmix64 update + finalizer). Output
// i is a pure function of (seed, i), so draws are reproducible across
// platforms and substreams can be derived for parallel generation
// without touching the parent stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // [0, 1), 53-bit resolution
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Box-Muller; consumes exactly two uniforms per draw.
    double normal() {
        const double u1 = 1.0 - next_unit();  // (0, 1]
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    long poisson(double lambda);

    // Independent substream; derived from the construction seed only, so
    // split(i) is the same no matter how much the parent has drawn.
    Rng split(std::uint64_t stream) const {
        return Rng(mix(seed_ ^ mix((stream + 1) * 0xD1B54A32D192ED03ull)));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

}  // namespace osos

#endif
