#pragma once

#include <cstdint>
#include <random>

namespace aigcfl {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent substream seed from a master seed.  Results depend only
// on (master, stream), never on evaluation order, so parallel and sequential
// schedules produce identical output.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream = 0) {
    return Rng(derive_seed(master, stream));
}

// Uniform draw on (0, 1]: never returns 0, so inverse-CDF sampling of densities
// supported on (0, max] stays inside the support.
inline double uniform_open0(Rng& rng) {
    return 1.0 - (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

}  // namespace aigcfl
