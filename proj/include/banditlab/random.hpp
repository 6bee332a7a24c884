// Seed derivation for reproducible experiments.
//
// A root seed expands into independent streams keyed by small integer tags
// (seed index, context, arm, ...). Keys are mixed with SplitMix64, so adding a
// stream never shifts the draws of another one.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace banditlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = splitmix64(root);
    for (std::uint64_t tag : tags) h = splitmix64(h ^ splitmix64(tag + 0x632BE59BD9B4E019ULL));
    return h;
}

// Stream domains, so that e.g. (seed, context) and (seed, arm) never collide.
enum class StreamDomain : std::uint64_t { Reward = 1, Context = 2, Log = 3, Instance = 4 };

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace banditlab
