#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace dso {

// Counter-based generator: every draw is a pure function of
// (seed, path, step, dim), so path-parallel partitioning cannot change the
// stream. Mixing is the splitmix64 finalizer applied to the packed key.
namespace rng {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                         std::uint64_t dim) {
    std::uint64_t k = mix64(seed ^ 0x853c49e6748fea9bULL);
    k = mix64(k ^ path);
    k = mix64(k ^ (step << 8 | dim));
    return k;
}

// uniform in (0, 1)
inline double uniform(std::uint64_t k) {
    return (static_cast<double>(k >> 11) + 0.5) * 0x1.0p-53;
}

// standard normal via Box-Muller from two decorrelated sub-streams
inline double normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                     std::uint64_t dim) {
    const std::uint64_t k = key(seed, path, step, dim);
    const double u1 = uniform(k);
    const double u2 = uniform(mix64(k ^ 0xda942042e4dd58b5ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

}  // namespace rng
}  // namespace dso
