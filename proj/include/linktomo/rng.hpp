#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

#include "linktomo/error.hpp"

namespace linktomo {

/// Mixes a stream index into a base seed (splitmix64 finalizer). Used to give
/// every instance/trial its own independent, reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random source. std::mt19937_64 output is pinned by the
/// standard; the distributions below are hand-rolled because the standard
/// library distribution objects are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t u64() { return eng_(); }

    /// Uniform in [0, n) by rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) fail(Errc::bad_input, "Rng::below(0)");
        std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
        std::uint64_t v = u64();
        while (v >= limit) v = u64();
        return v % n;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double real01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double real(double lo, double hi) { return lo + (hi - lo) * real01(); }

    /// Exponential with the given mean (zero mean gives identically zero).
    double exponential(double mean) {
        if (mean <= 0.0) return 0.0;
        return -mean * std::log1p(-real01());
    }

    /// Index drawn proportionally to the (nonnegative) weights.
    std::size_t weighted_pick(std::span<const double> weights, double total) {
        double u = real01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace linktomo
