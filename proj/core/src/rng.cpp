#include "rfc/rng.hpp"

#include <cmath>
#include <numbers>

namespace rfc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) noexcept
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

double to_open_unit(std::uint64_t bits) noexcept
{
    // (x + 0.5) / 2^52 is exact in a double and lies strictly inside (0, 1).
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

std::array<double, 2> normal_pair(const Substream& s, std::uint32_t block) noexcept
{
    const std::array<std::uint32_t, 4> ctr{block, s.stream, static_cast<std::uint32_t>(s.path),
                                           static_cast<std::uint32_t>(s.path >> 32)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(s.seed),
                                           static_cast<std::uint32_t>(s.seed >> 32)};
    const auto r = philox4x32(ctr, key);
    const double u1 = to_open_unit((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
    const double u2 = to_open_unit((static_cast<std::uint64_t>(r[2]) << 32) | r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace rfc
