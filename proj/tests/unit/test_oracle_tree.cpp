#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "rfc/oracle/family.hpp"
#include "rfc/oracle/node_problems.hpp"
#include "rfc/oracle/tree.hpp"

using namespace rfc::oracle;

namespace {

// max over a uniform theta grid of a robust objective
template <typename F>
double brute_max(F&& f, double lo, double hi, int n = 20001)
{
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < n; ++i)
        best = std::max(best, f(lo + (hi - lo) * i / n));
    return best;
}

}  // namespace

TEST_CASE("tree indexing")
{
    const TreeMarket m({{{0.1, -0.1}, {0.5, 0.5}}, {{0.1, 0.0, -0.1}, {0.3, 0.3, 0.4}}, {{0.2, -0.2}, {0.5, 0.5}}});
    CHECK(m.nodes(0) == 1);
    CHECK(m.nodes(1) == 2);
    CHECK(m.nodes(2) == 6);
    CHECK(m.nodes(3) == 12);
    CHECK(m.descendants(1, 1, 3) == std::pair<std::size_t, std::size_t>{6, 12});
    CHECK(m.descendants(0, 0, 2) == std::pair<std::size_t, std::size_t>{0, 6});
    // leaf 7 at time 3: period 0 branch 1, period 1 branch 0, period 2 branch 1
    CHECK(m.branch_at(0, 7, 3) == 1);
    CHECK(m.branch_at(1, 7, 3) == 0);
    CHECK(m.branch_at(2, 7, 3) == 1);
    CHECK_THROWS_AS(TreeMarket({{{0.1, 0.2}, {0.5, 0.5}}}), std::invalid_argument);   // no down move
    CHECK_THROWS_AS(TreeMarket({{{0.1, -0.1}, {0.7, 0.5}}}), std::invalid_argument);  // not a distribution
    CHECK_THROWS_AS(TreeMarket({{{0.1, -1.2}, {0.5, 0.5}}}), std::invalid_argument);  // negative price
}

TEST_CASE("utilities and their conjugates")
{
    const auto lg = Utility::log();
    CHECK(lg.value(std::exp(2.0)) == doctest::Approx(2.0));
    CHECK(lg.value(0.0) == -std::numeric_limits<double>::infinity());
    const auto pw = Utility::power(2.0);
    CHECK(pw.value(2.0) == doctest::Approx(-0.5));
    const auto ex = Utility::exponential(0.5);
    CHECK(ex.value(0.0) == doctest::Approx(-2.0));
    CHECK_FALSE(ex.needs_positive_wealth());
    CHECK_THROWS_AS(Utility::power(1.0), std::invalid_argument);
    CHECK_THROWS_AS(Utility::exponential(0.0), std::invalid_argument);

    for (const auto& u : {lg, pw, Utility::power(0.5), ex}) {
        for (double y : {0.3, 1.0, 2.5}) {
            const double lo = u.needs_positive_wealth() ? 0.0 : -20.0;
            const double grid = brute_max([&](double x) { return u.value(x) - x * y; }, lo, 40.0, 400001);
            CHECK(u.conjugate(y) == doctest::Approx(grid).epsilon(1e-6));
            CHECK(u.conjugate(y) >= grid - 1e-12);
        }
    }
}

TEST_CASE("feasible amounts keep wealth positive")
{
    const auto [lo, hi] = feasible_amounts(1.0, {0.1, -0.08});
    CHECK(lo == doctest::Approx(-10.0));
    CHECK(hi == doctest::Approx(12.5));
    const auto [lo3, hi3] = feasible_amounts(2.0, {0.12, 0.01, -0.1});
    CHECK(lo3 == doctest::Approx(-2.0 / 0.12));
    CHECK(hi3 == doctest::Approx(20.0));
}

TEST_CASE("golden and simplex searches")
{
    const auto m = golden_minimize([](double x) { return (x - 0.3) * (x - 0.3); }, -1.0, 2.0);
    CHECK(m.x == doctest::Approx(0.3).epsilon(1e-8));
    const auto edge = golden_minimize([](double x) { return x; }, 0.0, 1.0);
    CHECK(edge.x == 0.0);
    const auto mx = golden_maximize([](double x) { return -std::abs(x - 0.7); }, 0.0, 1.0);
    CHECK(mx.x == doctest::Approx(0.7).epsilon(1e-8));

    const std::vector<double> target{0.2, 0.5, 0.3};
    const auto s = simplex_minimize(3, [&](const std::vector<double>& w) {
        double d = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            d += (w[i] - target[i]) * (w[i] - target[i]);
        return d;
    });
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(s.w[i] == doctest::Approx(target[i]).epsilon(1e-6));
    const auto one = simplex_minimize(1, [](const std::vector<double>& w) { return w[0]; });
    CHECK(one.w == std::vector<double>{1.0});
}

TEST_CASE("martingale kernels")
{
    const EmmSet two({0.1, -0.08});
    REQUIRE(two.unique());
    const auto m = two.at(0.0);
    CHECK(m[0] == doctest::Approx(0.08 / 0.18));
    const EmmSet three({0.12, 0.01, -0.1});
    CHECK_FALSE(three.unique());
    for (double s : {0.0, 0.25, 0.5, 1.0}) {
        const auto q = three.at(s);
        CHECK(std::accumulate(q.begin(), q.end(), 0.0) == doctest::Approx(1.0));
        CHECK(q[0] * 0.12 + q[1] * 0.01 - q[2] * 0.1 == doctest::Approx(0.0).epsilon(1e-14));
        for (double v : q)
            CHECK(v >= 0.0);
    }
}

TEST_CASE("log node: Kelly fraction on a single coin")
{
    // max_theta 0.6 ln(1 + 0.1 theta) + 0.4 ln(1 - 0.1 theta): theta = (2p - 1) / a
    const Period coin{{0.1, -0.1}, {0.6, 0.4}};
    const auto r = log_node_fixed(coin, coin.p, {0.0, 0.0});
    CHECK(r.theta == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(r.c == doctest::Approx(0.6 * std::log(1.2) + 0.4 * std::log(0.8)).epsilon(1e-12));
    const Period fair{{0.1, -0.1}, {0.5, 0.5}};
    CHECK(std::abs(log_node_fixed(fair, fair.p, {0.0, 0.0}).theta) < 1e-8);
    // continuation constants shift the value but not the position
    const auto shifted = log_node_fixed(coin, coin.p, {0.3, 0.3});
    CHECK(shifted.c == doctest::Approx(r.c + 0.3));
    CHECK(shifted.theta == doctest::Approx(r.theta).epsilon(1e-8));
}

TEST_CASE("log node over kernels matches brute force")
{
    const Period tri{{0.12, 0.01, -0.1}, {0.4, 0.35, 0.25}};
    const std::vector<Kernel> ks{{tri.p, 0.0, "p"}, {{0.3, 0.35, 0.35}, 0.01, "q1"}, {{0.25, 0.45, 0.3}, 0.02, "q2"}};
    const std::vector<double> cc{0.01, 0.0, -0.02};
    const auto r = log_node_kernels(tri, ks, cc);
    // worst case over a convex hull is attained at a vertex for fixed theta
    const auto robust = [&](double th) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& k : ks) {
            double v = k.penalty;
            for (std::size_t i = 0; i < 3; ++i)
                v += k.q[i] * (std::log(1.0 + th * tri.returns[i]) + cc[i]);
            worst = std::min(worst, v);
        }
        return worst;
    };
    CHECK(r.c == doctest::Approx(brute_max(robust, -1.0 / 0.12, 10.0, 400001)).epsilon(1e-8));
    CHECK(r.c == doctest::Approx(robust(r.theta)).epsilon(1e-12));
    double pen = 0.0;
    const auto mixed = mix_kernels(ks, r.weights, &pen);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(mixed[i] == doctest::Approx(r.worst_q[i]));
    CHECK(pen == doctest::Approx(r.worst_penalty));
}

TEST_CASE("entropic node matches a q-grid brute force")
{
    const Period coin{{0.1, -0.1}, {0.55, 0.45}};
    const double delta = 0.5;
    const auto r = log_node_entropic(coin, delta, {0.0, 0.0});
    // inf over q of E^q[ln(1 + theta r)] + delta KL(q || p), q on a fine grid
    const auto robust = [&](double th) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 1; i < 4000; ++i) {
            const double q = i / 4000.0;
            const double v = q * std::log(1.0 + 0.1 * th) + (1 - q) * std::log(1.0 - 0.1 * th) +
                             delta * relative_entropy({q, 1 - q}, coin.p);
            best = std::min(best, v);
        }
        return best;
    };
    const double brute = brute_max(robust, -3.0, 3.0, 601);
    CHECK(r.c == doctest::Approx(brute).epsilon(1e-6));
    // worst kernel is the exponential tilt
    const double w0 = coin.p[0] * std::pow(1.0 + 0.1 * r.theta, -1.0 / delta);
    const double w1 = coin.p[1] * std::pow(1.0 - 0.1 * r.theta, -1.0 / delta);
    CHECK(r.worst_q[0] == doctest::Approx(w0 / (w0 + w1)).epsilon(1e-8));
}

TEST_CASE("dual node on a complete period")
{
    const Period coin{{0.1, -0.08}, {0.55, 0.45}};
    const std::vector<Kernel> ref{{coin.p, 0.0, "p"}};
    const auto d = log_dual_kernels(coin, ref, {0.0, 0.0});
    const std::vector<double> m{0.08 / 0.18, 0.1 / 0.18};
    CHECK(d.D == doctest::Approx(relative_entropy(coin.p, m)).epsilon(1e-12));
    // the primal optimum over the same kernel is ln x + KL(p || m)
    CHECK(log_node_fixed(coin, coin.p, {0.0, 0.0}).c == doctest::Approx(d.D).epsilon(1e-9));
    const auto e = log_dual_entropic(coin, 1.0, {0.0, 0.0});
    CHECK(e.D == doctest::Approx(log_node_entropic(coin, 1.0, {0.0, 0.0}).c).epsilon(1e-8));
}

TEST_CASE("relative entropy")
{
    CHECK(relative_entropy({0.5, 0.5}, {0.5, 0.5}) == 0.0);
    CHECK(relative_entropy({0.7, 0.3}, {0.5, 0.5}) ==
          doctest::Approx(0.7 * std::log(1.4) + 0.3 * std::log(0.6)));
}

TEST_CASE("family validation")
{
    const TreeMarket m({{{0.1, -0.1}, {0.5, 0.5}}});
    CHECK_NOTHROW(MeasureFamily::reference(m).validate(m));
    const auto bad = MeasureFamily::kernels({{{{0.5, 0.3}, 0.0, "short"}}});
    CHECK_THROWS_AS(bad.validate(m), std::invalid_argument);
    const auto zero = MeasureFamily::kernels({{{{1.0, 0.0}, 0.0, "not equivalent"}}});
    CHECK_THROWS_AS(zero.validate(m), std::invalid_argument);
    CHECK_THROWS_AS(MeasureFamily::entropic(-1.0), std::invalid_argument);
    const auto sc = MeasureFamily::scenarios({{0, 1, {{{{0.6, 0.4}}, 0.0, "a"}}}});
    CHECK_NOTHROW(sc.validate(m));
    CHECK_THROWS_AS(sc.scenarios_for(0, 2), std::invalid_argument);
}

TEST_CASE("degenerate singleton family")
{
    CHECK(degenerate_up_probability(0.0) == 0.5);
    CHECK(symmetric_log_growth(0.5) == doctest::Approx(0.0));
    const double q = degenerate_up_probability(0.2);
    CHECK(q == doctest::Approx(0.5 * (1.0 + 0.2 / std::sqrt(1.04))));
    // log growth is the value of the one-period Kelly bet
    const Period coin{{0.1, -0.1}, {0.5, 0.5}};
    CHECK(symmetric_log_growth(q) == doctest::Approx(log_node_fixed(coin, {q, 1 - q}, {0.0, 0.0}).c).epsilon(1e-9));

    const TreeMarket m({coin, coin});
    const auto fam = degenerate_family(m, {{0, 1, 0.2}, {0, 2, 0.1}, {1, 2, 0.3}});
    const auto& s = fam.scenarios_for(0, 2);
    REQUIRE(s.scenarios.size() == 1);
    CHECK(s.scenarios[0].penalty == doctest::Approx(-2.0 * symmetric_log_growth(degenerate_up_probability(0.1))));
    const TreeMarket skew({{{0.1, -0.2}, {0.5, 0.5}}});
    CHECK_THROWS_AS(degenerate_family(skew, {{0, 1, 0.2}}), std::invalid_argument);
}
