#ifndef RIG_RNG_HPP
#define RIG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace rig {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream for (seed, stream) so replicates can run in any order.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(splitmix64(seed ^ splitmix64(stream + 0x5851F42D4C957F2DULL)));
}

// Uniform on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
    for (;;) {
        double u = std::generate_canonical<double, 53>(rng);
        if (u > 0.0 && u < 1.0) return u;
    }
}

inline double exponential(Rng& rng, double rate) {
    return -std::log(uniform_open(rng)) / rate;
}

inline double standard_normal(Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    return nd(rng);
}

inline long poisson(Rng& rng, double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<long> pd(mean);
    return pd(rng);
}

}  // namespace rig

#endif
