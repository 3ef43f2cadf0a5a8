#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rfc/coefficients.hpp"
#include "rfc/paths.hpp"
#include "rfc/stats.hpp"
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

}  // namespace

TEST_CASE("coefficient validation")
{
    const TimeGrid g(1.0, 10);
    CHECK_THROWS_AS(realize(market(0.0, 0.3, 1.0), g), std::invalid_argument);
    CHECK_THROWS_AS(realize(market(0.2, 0.3, -1.0), g), std::invalid_argument);
    CHECK_THROWS_AS(realize(market(0.2, NAN, 1.0), g), std::invalid_argument);
    auto c = market(0.2, 0.3, 1.0);
    c.lambda_hat = CoefficientPath::tabulated({0.1, 0.2});
    CHECK_THROWS_AS(realize(c, g), std::invalid_argument);
    c.lambda_hat = CoefficientPath::function([](double t) { return 0.1 + t; });
    const auto tab = realize(c, g);
    CHECK(tab.lambda_hat[3] == doctest::Approx(0.1 + 0.3));  // left endpoint of step 3
}

TEST_CASE("log-scheme moments match the closed form")
{
    // mean of ln(S_T / S_0) is (sigma lambda - sigma^2 / 2) T
    const TimeGrid g(1.0, 252);
    const std::size_t n = 20000;
    const auto ens = simulate_ensemble(market(0.2, 0.3, 1.0), g, n, 11, 0);
    std::vector<double> logret(n), var_sample(n);
    for (std::size_t i = 0; i < n; ++i)
        logret[i] = std::log(ens[i].S.back() / ens[i].S.front());
    const auto m = summarize(logret);
    CHECK(std::abs(m.mean - 0.04) <= 3.0 * 0.2 / std::sqrt(double(n)));
    // variance sigma^2 T, standard error of the sample variance ~ sigma^2 sqrt(2 / n)
    double var = 0.0;
    for (double v : logret)
        var += (v - m.mean) * (v - m.mean);
    var /= double(n - 1);
    CHECK(std::abs(var - 0.04) <= 4.0 * 0.04 * std::sqrt(2.0 / double(n)));

    const auto flat = simulate_ensemble(market(0.2, 0.0, 1.0), g, n, 12, 0);
    for (std::size_t i = 0; i < n; ++i)
        logret[i] = std::log(flat[i].S.back());
    const auto f = summarize(logret);
    CHECK(std::abs(f.mean + 0.02) <= 4.0 * f.std_error);
}

TEST_CASE("positivity, independence and increment variance")
{
    const TimeGrid g(1.0, 50);
    const std::size_t n = 4000;
    const auto ens = simulate_ensemble(market(0.8, 2.0, 1.0), g, n, 3, 0);
    std::vector<double> a, b;
    for (const auto& p : ens) {
        CHECK(p.S.size() == 51);
        for (double s : p.S)
            REQUIRE(s > 0.0);
        a.insert(a.end(), p.dW1.begin(), p.dW1.end());
        b.insert(b.end(), p.dW2.begin(), p.dW2.end());
    }
    CHECK(std::abs(correlation(a, b)) <= 4.0 / std::sqrt(double(a.size())));
    double v = 0.0;
    for (double x : a)
        v += x * x;
    v /= double(a.size());
    CHECK(std::abs(v / g.dt() - 1.0) < 4.0 * std::sqrt(2.0 / double(a.size())));
}

TEST_CASE("ensembles do not depend on the worker count")
{
    const TimeGrid g(1.0, 64);
    const auto one = simulate_ensemble(market(0.2, 0.3, 1.0), g, 257, 99, 1);
    const auto eight = simulate_ensemble(market(0.2, 0.3, 1.0), g, 257, 99, 8);
    std::ostringstream x, y;
    write_ensemble_csv(x, one);
    write_ensemble_csv(y, eight);
    CHECK(x.str() == y.str());
    const auto other = simulate_ensemble(market(0.2, 0.3, 1.0), g, 257, 100, 1);
    CHECK(other[0].dW1 != one[0].dW1);
    // a path does not depend on how many paths are drawn
    const auto few = simulate_ensemble(market(0.2, 0.3, 1.0), g, 3, 99, 1);
    CHECK(few[2].S == one[2].S);
}

TEST_CASE("wealth identities")
{
    const TimeGrid g(1.0, 100);
    const auto ens = simulate_ensemble(market(0.25, 0.4, 1.0), g, 8, 5, 1);
    for (const auto& p : ens) {
        const auto none = wealth_from_strategy(p, Strategy::constant_fraction(0.0), 2.0);
        for (double x : none.X)
            CHECK(x == 2.0);
        const auto full = wealth_from_strategy(p, Strategy::constant_fraction(1.0), 1.0);
        CHECK(full.X.back() == doctest::Approx(p.S.back() / p.S.front()).epsilon(1e-13));
        CHECK(terminal_log_wealth(p, Strategy::constant_fraction(1.0), 1.0) ==
              doctest::Approx(std::log(full.X.back())).epsilon(1e-13));
        const auto lev = wealth_from_strategy(p, Strategy::constant_fraction(5.0), 1.0);
        for (double x : lev.X)
            CHECK(x > 0.0);
        CHECK(log_wealth_between(p, Strategy::constant_fraction(1.0), 1.0, 0, 100) ==
              doctest::Approx(std::log(full.X.back())).epsilon(1e-13));
    }
    CHECK_THROWS_AS(wealth_from_strategy(ens[0], Strategy::constant_fraction(1.0), 0.0), std::invalid_argument);
}

TEST_CASE("fractional Kelly log wealth drift")
{
    // pi_bar = 0.75; E ln X_T = (pi sigma lambda - pi^2 sigma^2 / 2) T = 0.045 - 0.01125
    const TimeGrid g(1.0, 252);
    const std::size_t n = 20000;
    const auto c = market(0.2, 0.3, 1.0);
    const auto ens = simulate_ensemble(c, g, n, 21, 0);
    std::vector<double> lw(n);
    for (std::size_t i = 0; i < n; ++i)
        lw[i] = terminal_log_wealth(ens[i], fractional_kelly(c), 1.0);
    const auto m = summarize(lw);
    const double pi = 0.75, s = 0.2, l = 0.3;
    CHECK(std::abs(m.mean - (pi * s * l - 0.5 * pi * pi * s * s)) <= 4.0 * m.std_error);
}

TEST_CASE("ensemble csv layout")
{
    const TimeGrid g(1.0, 2);
    const auto ens = simulate_ensemble(market(0.2, 0.3, 1.0), g, 1, 1, 1);
    std::ostringstream out;
    write_ensemble_csv(out, ens);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "path_id,k,t,S,dW1,dW2");
    int rows = 0;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 3);
    const auto j = ensemble_manifest(market(0.2, 0.3, 1.0), g, 1, 1);
    CHECK(j.at("seed") == 1);
}
