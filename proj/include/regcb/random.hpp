#ifndef REGCB_RANDOM_HPP
#define REGCB_RANDOM_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace regcb {

using Rng = std::mt19937_64;

/// Independent random streams derived from one user seed.
enum class Stream : std::uint64_t {
    permutation = 1,
    reward_noise = 2,
    contexts = 3,
    world = 4,
    holdout = 5,
    algorithm = 6,
    bootstrap = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0)
{
    return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream)) + index);
}

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0)
{
    return Rng{derive_seed(seed, stream, index)};
}

// The standard distributions are implementation-defined; these are not, so outputs are
// reproducible across standard libraries.

/// Uniform on [0,1) with 53 bits.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n)
{
    const auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return i < n ? i : n - 1;
}

inline bool bernoulli(Rng& rng, double p)
{
    return uniform01(rng) < p;
}

inline double standard_normal(Rng& rng)
{
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace regcb

#endif  // REGCB_RANDOM_HPP
