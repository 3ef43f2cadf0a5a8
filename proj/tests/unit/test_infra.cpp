#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "rfc/grid.hpp"
#include "rfc/parallel.hpp"
#include "rfc/rng.hpp"
#include "rfc/schema.hpp"
#include "rfc/stats.hpp"

using namespace rfc;

TEST_CASE("time grid endpoints and lookup")
{
    const TimeGrid g(1.0, 252);
    CHECK(g.time(0) == 0.0);
    CHECK(g.time(252) == 1.0);
    CHECK(g.dt() == doctest::Approx(1.0 / 252));
    for (std::size_t k = 0; k < 252; ++k)
        CHECK(g.time(k) < g.time(k + 1));
    CHECK(g.index_of(0.5) == 126);
    CHECK_THROWS_AS(g.index_of(0.001), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
}

TEST_CASE("philox known answer")
{
    // Random123 kat_vectors, philox4x32_10.
    const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);
    const auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);
    const auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("normal pairs are substream-local and roughly standard")
{
    const Substream a{7, streams::kReference, 3};
    CHECK(normal_pair(a, 11) == normal_pair(a, 11));
    CHECK(normal_pair(a, 11) != normal_pair(a, 12));
    CHECK(normal_pair(a, 11) != normal_pair(Substream{7, streams::kReference, 4}, 11));
    CHECK(normal_pair(a, 11) != normal_pair(Substream{8, streams::kReference, 3}, 11));
    std::vector<double> z;
    for (std::uint32_t b = 0; b < 50000; ++b) {
        const auto p = normal_pair(a, b);
        z.push_back(p[0]);
        z.push_back(p[1]);
    }
    const auto m = summarize(z);
    CHECK(std::abs(m.mean) < 4.0 * m.std_error);
    double var = 0.0;
    for (double v : z)
        var += (v - m.mean) * (v - m.mean);
    var /= static_cast<double>(z.size() - 1);
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / static_cast<double>(z.size())));
}

TEST_CASE("open unit never hits the endpoints")
{
    CHECK(to_open_unit(0) > 0.0);
    CHECK(to_open_unit(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("parallel_for covers every index once for any worker count")
{
    for (int threads : {1, 2, 3, 8}) {
        std::vector<int> hits(1001, 0);
        parallel_for(hits.size(), threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                ++hits[i];
        });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    CHECK_THROWS_AS(parallel_for(10, 4,
                                 [](std::size_t b, std::size_t) {
                                     if (b > 0)
                                         throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
    CHECK(effective_threads(3) == 3);
    CHECK(effective_threads(0) >= 1);
}

TEST_CASE("summarize matches a direct computation")
{
    const std::vector<double> x{1.0, 2.0, 4.0, 7.0};
    const auto m = summarize(x);
    CHECK(m.mean == doctest::Approx(3.5));
    // sample variance 7, stderr sqrt(7 / 4)
    CHECK(m.std_error == doctest::Approx(std::sqrt(7.0 / 4.0)));
    CHECK(m.n == 4);
    const std::vector<double> y{2.0, 4.0, 8.0, 14.0};
    CHECK(correlation(x, y) == doctest::Approx(1.0));
}

TEST_CASE("strict object reader")
{
    const auto j = nlohmann::json::parse(R"({"a": 1.5, "b": {"c": 2}, "s": "x", "extra": 0})");
    ObjectReader r(j, "cfg");
    CHECK(r.number("a") == 1.5);
    CHECK(r.number("missing", 3.0) == 3.0);
    auto b = r.object("b");
    CHECK(b.count("c") == 2);
    b.finish();
    CHECK(r.string("s") == "x");
    try {
        r.finish();
        FAIL("unknown key accepted");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "cfg.extra");
    }
    CHECK(r.resolved()["missing"] == 3.0);
    CHECK(r.resolved()["b"]["c"] == 2);
    try {
        r.number("nope");
        FAIL("missing key accepted");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "cfg.nope");
    }
    try {
        r.count("a");
        FAIL("non-integer accepted");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "cfg.a");
    }
}
