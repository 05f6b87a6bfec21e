#ifndef NHPP_RNG_HPP
#define NHPP_RNG_HPP

#include <cstdint>
#include <random>

namespace nhpp {

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to derive independent per-task streams from a
// master seed so parallel results do not depend on scheduling order.
inline std::uint64_t mix_seed(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t task_index) {
    return mix_seed(master ^ mix_seed(task_index));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t task_index = 0) {
    return Rng(derive_seed(master, task_index));
}

} // namespace nhpp

#endif
