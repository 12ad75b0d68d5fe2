#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <boost/math/distributions/normal.hpp>

namespace l2boost {

/// Reproducible random streams.
///
/// Seeding scheme: a stream seed is derived from (master_seed, replication,
/// label) by folding each component through the SplitMix64 finalizer, with
/// the label first reduced by 64-bit FNV-1a. The derived seed initializes a
/// std::mt19937_64, whose output sequence is fixed by the C++ standard.
///
/// Uniforms use the top 53 bits: u = (k + 0.5) / 2^53, so u lies strictly in
/// (0, 1). Normals are drawn by inversion, z = Phi^{-1}(u), with
/// boost::math's normal quantile. One normal consumes exactly one engine
/// output, so draw counts and positions are predictable.
namespace rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication,
                                           std::string_view label = "") noexcept {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ replication);
    return splitmix64(h ^ fnv1a64(label));
}

}  // namespace rng

class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}
    Stream(std::uint64_t master_seed, std::uint64_t replication, std::string_view label)
        : engine_(rng::derive_seed(master_seed, replication, label)) {}

    double uniform() {
        constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
        return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
    }

    double normal() {
        static const boost::math::normal_distribution<double> standard;
        return boost::math::quantile(standard, uniform());
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace l2boost
