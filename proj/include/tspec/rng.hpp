#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tspec {

// Derives an independent 64-bit seed from a base seed and a purpose string,
// e.g. derive_seed(seed, "split"). Stable across platforms and builds.
std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose);
std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose, std::uint64_t index);

// Seeded generator with platform-independent sampling helpers. The standard
// distributions are implementation-defined, so artifacts produced through
// them would not be byte-reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n);

    // Standard normal draw (Box-Muller, one value per call).
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    template <typename It>
    void shuffle(It first, It last)
    {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            std::uint64_t j = below(i);
            std::iter_swap(first + (i - 1), first + j);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace tspec
