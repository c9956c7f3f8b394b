#pragma once

#include <cmath>
#include <cstdint>

#include "gbf/config.hpp"

namespace gbf {

// Deterministic generator (splitmix64 core) with explicit Box-Muller
// normals. Avoids std::*_distribution so that streams are identical
// across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    cplx cnormal() { return {normal(), normal()}; }

    // Stable sub-stream derivation: child(seed, k) streams are independent
    // of the order in which they are created.
    Rng child(std::uint64_t k) const {
        Rng r(state_ ^ (0xd1342543de82ef95ull * (k + 1)));
        r.next_u64();
        return r;
    }

  private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace gbf
