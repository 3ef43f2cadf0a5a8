#pragma once

#include <array>
#include <cstdint>

namespace rfc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Pure function of (counter, key); no state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Identifies an independent substream: the experiment seed is the key and
/// (stream, path) select the counter block family. Draw `block` of a
/// substream is counter {block, stream, path_lo, path_hi}.
struct Substream {
    std::uint64_t seed = 0;
    std::uint32_t stream = 0;
    std::uint64_t path = 0;
};

/// Two independent standard normals for draw `block` of the substream,
/// produced by Box-Muller from two 52-bit uniforms in (0, 1).
std::array<double, 2> normal_pair(const Substream& s, std::uint32_t block) noexcept;

/// Uniform in (0, 1) from 64 random bits, never 0 or 1.
double to_open_unit(std::uint64_t bits) noexcept;

/// Stream tags used by the simulation layers.
namespace streams {
inline constexpr std::uint32_t kReference = 0;
/// Outer scenarios drawn for conditioning: kOuterBase | tag.
inline constexpr std::uint32_t kOuterBase = 0x40000000u;
/// Sub-path resimulation: kResimBase | outer index.
inline constexpr std::uint32_t kResimBase = 0x80000000u;
}  // namespace streams

}  // namespace rfc
