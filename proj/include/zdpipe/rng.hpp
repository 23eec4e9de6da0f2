#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace zdpipe {

/// Per-stage seed tags. Every pipeline stage derives its own stream as
/// derive_seed(master_seed, tag) so stages are independently reproducible
/// and re-running one stage never perturbs another.
namespace stage {
inline constexpr std::uint64_t kSubsample    = 0x5b5ad4f1e530c9a1ull;
inline constexpr std::uint64_t kSynthesize   = 0xa24baed4963ee407ull;
inline constexpr std::uint64_t kSplitAssign  = 0x71c62356e2d934c2ull;
inline constexpr std::uint64_t kSplitShuffle = 0x9e6c63d0a1c3f5b7ull;
inline constexpr std::uint64_t kSmote        = 0x3c79ac492ba7b653ull;
inline constexpr std::uint64_t kFolds        = 0x1c69b3f74ac4fb91ull;
inline constexpr std::uint64_t kModel        = 0xd36c58a1f2b80c67ull;
inline constexpr std::uint64_t kTrial        = 0x94d049bb133111ebull;
}  // namespace stage

/// splitmix64 finalizer; decorrelates nearby seed values.
inline std::uint64_t mix_u64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    return mix_u64(master ^ tag);
}

/// Deterministic RNG for every sampling step in the pipeline.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distribution helpers are implemented here instead of
/// <random>'s distribution templates because those are implementation
/// defined; with this class the same seed yields the same stream on every
/// platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1): 53 random mantissa bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in {0, ..., n-1}, unbiased (rejection sampling).
    std::size_t next_below(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return static_cast<std::size_t>(x % bound);
    }

    /// Standard normal via Box-Muller; draws two uniforms per pair.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace zdpipe
