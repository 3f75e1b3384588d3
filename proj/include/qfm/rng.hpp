// rng.hpp — seedable counter-based pseudorandom generator (splitmix64) with
// per-realization substreams so ensembles are identical regardless of the
// order in which realizations are generated.
#pragma once

#include <cstdint>

namespace qfm {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return splitmix64_mix(state_);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi); returns lo when the interval is degenerate
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

  private:
    std::uint64_t state_;
};

// Substream seed for realization `stream` of a run seeded with `master`.
// `salt` separates independent draws within one realization (bath vs E0).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t salt = 0) {
    std::uint64_t h = splitmix64_mix(master);
    h = splitmix64_mix(h ^ (stream + 0x9E3779B97F4A7C15ull));
    if (salt != 0) h = splitmix64_mix(h ^ (salt * 0xD1B54A32D192ED03ull));
    return h;
}

}  // namespace qfm
