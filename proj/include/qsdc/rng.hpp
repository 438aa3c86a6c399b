#pragma once

#include <cstdint>
#include <limits>

namespace qsdc {

/// Counter-based random stream. Each trial owns a stream keyed by
/// (master_seed, trial_index), so results do not depend on scheduling.
/// Satisfies UniformRandomBitGenerator; the body is SplitMix64.
class TrialStream {
  public:
    using result_type = std::uint64_t;

    TrialStream(std::uint64_t master_seed, std::uint64_t index)
        : state_(mix(mix(master_seed) ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, n), n small.
    unsigned below(unsigned n) { return static_cast<unsigned>(uniform() * n); }

    bool coin() { return ((*this)() >> 63) != 0; }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

/// Seed for a sub-run (schedule stage, repetition) derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t salt) {
    return TrialStream::mix(master_seed ^ TrialStream::mix(salt + 0x632BE59BD9B4E019ULL));
}

} // namespace qsdc
