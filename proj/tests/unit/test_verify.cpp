#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rfc/criteria.hpp"
#include "rfc/verify.hpp"

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

const auto kMarket = market(0.2, 0.3, 1.0);

}  // namespace

TEST_CASE("verdict classification")
{
    CHECK(classify(0.0, 1.0) == Verdict::MartingaleConsistent);
    CHECK(classify(2.9, 1.0) == Verdict::MartingaleConsistent);
    CHECK(classify(3.1, 1.0) == Verdict::SubmartingaleConsistent);
    CHECK(classify(-3.1, 1.0) == Verdict::Violation);
    CHECK(supermartingale_consistent(-10.0, 1.0));
    CHECK_FALSE(supermartingale_consistent(3.5, 1.0));
    CHECK(to_string(Verdict::Violation) != to_string(Verdict::MartingaleConsistent));
}

TEST_CASE("criterion drift against closed values")
{
    const TimeGrid g(1.0, 50);
    const auto f = field_log(kMarket, g);
    const auto pen = PenaltySpec::quadratic(1.0);
    const std::size_t n = 20000;

    const auto saddle = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::worst_case(), pen, 0.0, 1.0, n, 42);
    CHECK(saddle.martingale_consistent());
    CHECK(saddle.n_paths == n);

    // reference measure: pi sigma lambda - pi^2 sigma^2 / 2 + A' = 0.01125
    const auto ref = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::zero(), pen, 0.0, 1.0, n, 42);
    CHECK(std::abs(ref.estimate - 0.01125) <= 4.0 * ref.std_error);
    CHECK(ref.verdict == Verdict::SubmartingaleConsistent);

    // half Kelly against the worst case: drift -pi_bar^2 sigma^2 / 8 = -0.0028125
    const auto half = drift_test(f, Strategy::scaled(fractional_kelly(kMarket), 0.5), GeneratorSpec::worst_case(),
                                 pen, 0.0, 1.0, n, 42);
    CHECK(std::abs(half.estimate + 0.0028125) <= 4.0 * half.std_error);
    CHECK(half.verdict == Verdict::Violation);

    DriftOptions rw;
    rw.reweight = true;
    const auto reweighted = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::worst_case(), pen, 0.0, 1.0, n, 42, rw);
    CHECK(reweighted.method != saddle.method);
    CHECK(std::abs(reweighted.estimate) <= 4.0 * reweighted.std_error);
}

TEST_CASE("entropic penalty at the saddle")
{
    const TimeGrid g(1.0, 50);
    const auto f = field_log(kMarket, g);
    const auto r = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::worst_case(), PenaltySpec::entropic(1.0),
                              0.0, 1.0, 20000, 3);
    CHECK(r.martingale_consistent());
}

TEST_CASE("antithetic pairs cancel the linear noise")
{
    const TimeGrid g(1.0, 50);
    const auto f = field_log(kMarket, g);
    const auto pen = PenaltySpec::quadratic(1.0);
    DriftOptions anti;
    anti.antithetic = true;
    const auto plain = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::zero(), pen, 0.0, 1.0, 4000, 5);
    const auto paired = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::zero(), pen, 0.0, 1.0, 4000, 5, anti);
    CHECK(paired.antithetic);
    CHECK(paired.std_error < 0.1 * plain.std_error);
    CHECK(std::abs(paired.estimate - 0.01125) <= 4.0 * paired.std_error + 1e-12);
}

TEST_CASE("false violation rate at the saddle stays small")
{
    const TimeGrid g(1.0, 20);
    const auto f = field_log(kMarket, g);
    int violations = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto r = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::worst_case(), PenaltySpec::quadratic(1.0),
                                  0.0, 1.0, 1000, seed);
        violations += r.verdict == Verdict::Violation;
    }
    // nominal one-sided rate 0.13%
    CHECK(violations <= 2);
}

TEST_CASE("conditional drift from frozen states")
{
    const TimeGrid g(1.0, 40);
    const auto f = field_log(kMarket, g);
    DriftOptions opt;
    opt.outer_paths = 16;
    const auto r = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::worst_case(), PenaltySpec::quadratic(1.0),
                              0.5, 1.0, 16000, 11, opt);
    CHECK(r.per_state.size() == 16);
    CHECK(r.martingale_consistent());
    const auto ref = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::zero(), PenaltySpec::quadratic(1.0), 0.5,
                                1.0, 16000, 11, opt);
    CHECK(std::abs(ref.estimate - 0.005625) <= 4.0 * ref.std_error);
    CHECK_THROWS_AS(drift_test(f, fractional_kelly(kMarket), GeneratorSpec::zero(), PenaltySpec::quadratic(1.0), 0.51,
                               1.0, 100, 1, opt),
                    std::invalid_argument);
}

TEST_CASE("results do not depend on the worker count")
{
    const TimeGrid g(1.0, 30);
    const auto f = field_log(kMarket, g);
    DriftOptions one, many;
    one.threads = 1;
    many.threads = 8;
    const auto a = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::worst_case(), PenaltySpec::quadratic(1.0),
                              0.0, 1.0, 3001, 2, one);
    const auto b = drift_test(f, fractional_kelly(kMarket), GeneratorSpec::worst_case(), PenaltySpec::quadratic(1.0),
                              0.0, 1.0, 3001, 2, many);
    CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("log growth comparisons")
{
    // under the worst case, Kelly of the lambda_bar market beats a 1.5x lever by
    // (rho - 1)^2 pi_bar^2 sigma^2 / 2 = 0.0028125
    const TimeGrid g(1.0, 20);
    const auto f = field_log(kMarket, g);
    const auto d = log_growth_difference(f, fractional_kelly(kMarket), Strategy::scaled(fractional_kelly(kMarket), 1.5),
                                         GeneratorSpec::worst_case(), 0.0, 1.0, 4000, 1);
    CHECK(std::abs(d.mean - 0.0028125) <= 4.0 * d.std_error + 1e-12);
    const auto lg = expected_log_growth(f, fractional_kelly(kMarket), GeneratorSpec::worst_case(), 0.0, 1.0, 20000, 1);
    CHECK(std::abs(lg.mean - 0.01125) <= 4.0 * lg.std_error);
}

TEST_CASE("dual drift")
{
    const TimeGrid g(1.0, 50);
    const auto f = field_log(kMarket, g);
    const auto pen = PenaltySpec::quadratic(1.0);
    const auto a = dual_submartingale_test(f, 0.0, GeneratorSpec::worst_case(), pen, 0.5, 0.0, 1.0, 20000, 4);
    const auto b = dual_submartingale_test(f, 0.0, GeneratorSpec::worst_case(), pen, 2.0, 0.0, 1.0, 20000, 4);
    // V is -ln y plus a y-free part, so the drift does not see y
    CHECK(a.estimate == doctest::Approx(b.estimate).epsilon(1e-12));
    CHECK(a.martingale_consistent());
    CHECK(a.equality_case);
    // nu adds nu^2 / 2 per unit time
    const auto nu = dual_submartingale_test(f, 0.5, GeneratorSpec::worst_case(), pen, 1.0, 0.0, 1.0, 20000, 4);
    CHECK(std::abs(nu.estimate - 0.125) <= 4.0 * nu.std_error);
    CHECK_FALSE(nu.equality_case);
    CHECK(nu.submartingale_consistent());
}

TEST_CASE("self-generation scan")
{
    const TimeGrid g(1.0, 20);
    const auto f = field_log(kMarket, g);
    const std::vector<double> grid{0.5, 0.75, 1.0, 1.25, 1.5};
    const auto r = self_generation_scan(f, 0.0, 1.0, grid, grid, 4000, 7);
    CHECK(r.saddle);
    CHECK(r.value.size() == 5);
    CHECK(r.value[2][2].mean == doctest::Approx(r.target).epsilon(1e-2));
    CHECK(r.c_fit.within);
    CHECK(r.rho_fit.within);
    CHECK(r.rho_fit.curvature < 0.0);
    CHECK(r.c_fit.curvature > 0.0);
    std::ostringstream out;
    write_surface_csv(out, r);
    CHECK(out.str().rfind("rho,c,estimate,stderr\n", 0) == 0);
}
