#ifndef GFSIG_RNG_HPP
#define GFSIG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "gfsig/types.hpp"

namespace gfsig {

using Rng = std::mt19937_64;

// Stream purposes; part of the seed derivation, so values must never change.
enum class StreamTag : std::uint64_t {
    activity = 1,
    channel = 2,
    noise = 3,
    detector = 4,
    signature = 5,
    a1 = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

/// Independent generator for (base_seed, indices..., tag). Order-independent:
/// the stream depends only on the key, never on how many streams came before.
inline Rng derive_stream(std::uint64_t base_seed, std::initializer_list<std::uint64_t> key, StreamTag tag) {
    std::uint64_t h = splitmix64(base_seed);
    for (auto k : key) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32U)};
    return Rng(seq);
}

/// CN(0, variance): two independent real normals, each of variance/2.
inline cdouble complex_normal(Rng& rng, double variance = 1.0) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double s = std::sqrt(variance / 2.0);
    const double re = n(rng);
    const double im = n(rng);
    return {s * re, s * im};
}

inline CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double variance = 1.0) {
    CMatrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = complex_normal(rng, variance);
    return out;
}

}  // namespace gfsig

#endif  // GFSIG_RNG_HPP
