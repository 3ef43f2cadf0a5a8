#include <doctest.h>

#include <cmath>

#include "rfc/paths.hpp"
#include "rfc/strategies.hpp"

using namespace rfc;

namespace {

MarketCoefficients market(double sigma, double lambda, double delta)
{
    MarketCoefficients c;
    c.sigma = sigma;
    c.lambda_hat = lambda;
    c.delta = delta;
    return c;
}

StepState state(double sigma, double lambda, double delta)
{
    StepState s;
    s.sigma = sigma;
    s.lambda_hat = lambda;
    s.delta = delta;
    return s;
}

}  // namespace

TEST_CASE("fractional Kelly fractions")
{
    CHECK(kelly_fraction(0.2, 0.1, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(kelly_fraction(0.2, 0.1, 0.0) == 0.0);
    CHECK(std::abs(kelly_fraction(0.2, 0.3, 1e6) - 1.5) < 1e-5);
    const auto s = Strategy::fractional_kelly();
    CHECK(s.fraction(state(0.2, 0.3, 1.0)) == doctest::Approx(0.75));
    CHECK_THROWS_AS(s.fraction(state(0.0, 0.3, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(fractional_kelly(market(0.0, 0.3, 1.0)), std::invalid_argument);
}

TEST_CASE("worst-case generator")
{
    const TimeGrid g(1.0, 4);
    MarketState st;
    st.sigma = 0.2;
    st.lambda_hat = 0.3;
    st.delta = 1.0;
    const auto e = worst_case_generator(market(0.2, 0.3, 1.0)).at(st, g);
    CHECK(e[0] == doctest::Approx(-0.15));
    CHECK(e[1] == 0.0);
    // lambda_hat + eta1 is the equivalent price of risk, and pi_bar = lambda_bar / sigma
    CHECK(0.3 + e[0] == doctest::Approx(0.15));
    CHECK((0.3 + e[0]) / 0.2 == doctest::Approx(kelly_fraction(0.2, 0.3, 1.0)));
    st.delta = 0.0;
    CHECK(worst_case_generator(market(0.2, 0.3, 0.0)).at(st, g)[0] == doctest::Approx(-0.3));
}

TEST_CASE("scaled and tabulated strategies")
{
    StepState st = state(0.2, 0.3, 1.0);
    const auto sc = Strategy::scaled(Strategy::fractional_kelly(), 1.25);
    CHECK(sc.fraction(st) == doctest::Approx(0.9375));
    const auto tab = Strategy::tabulated({0.1, 0.2});
    st.k = 1;
    CHECK(tab.fraction(st) == 0.2);
    CHECK(Strategy::constant_fraction(0.4).fraction(st) == 0.4);
    CHECK_THROWS_AS(Strategy::constant_fraction(NAN).fraction(st), std::invalid_argument);
}

TEST_CASE("strategy json round trip")
{
    for (const auto& s : {Strategy::fractional_kelly(), Strategy::constant_fraction(0.4),
                          Strategy::tabulated({0.1, 0.2, 0.3}),
                          Strategy::scaled(Strategy::constant_fraction(0.5), 0.75)}) {
        const auto back = Strategy::from_json(s.describe());
        CHECK(back.describe() == s.describe());
        CHECK(back.id() == s.id());
    }
    CHECK_THROWS_AS(Strategy::from_json({{"type", "martingale"}}), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::from_json(nlohmann::json::array()), std::invalid_argument);
}
