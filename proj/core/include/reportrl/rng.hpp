#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace reportrl {

// Seeded mt19937_64 with hand-rolled draws, so sampled values are identical
// across platforms and standard-library versions (std::*_distribution is
// implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::size_t next_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::next_index: empty range");
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // Draws from normalized probabilities by CDF walk; rounding spill goes
    // to the last bucket.
    std::size_t categorical(std::span<const double> probs) {
        const double u = uniform();
        double cumulative = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            cumulative += probs[i];
            if (u < cumulative) return i;
        }
        return probs.size() - 1;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace reportrl
