#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "rfc/measures.hpp"
#include "rfc/paths.hpp"
#include "rfc/stats.hpp"

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

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// E[min(S, K)] for ln S ~ N(m, s^2)
double expected_min(double m, double s, double K)
{
    const double fwd = std::exp(m + 0.5 * s * s);
    const double d1 = (m - std::log(K) + s * s) / s;
    const double call = fwd * norm_cdf(d1) - K * norm_cdf(d1 - s);
    return fwd - call;
}

}  // namespace

TEST_CASE("zero generator leaves the density at one")
{
    const TimeGrid g(1.0, 50);
    const auto ens = simulate_ensemble(market(0.2, 0.3, 1.0), g, 20, 4, 1);
    for (const auto& p : ens) {
        const auto mc = doleans(GeneratorSpec::zero(), p);
        REQUIRE(mc.D.size() == 51);
        for (double d : mc.D)
            CHECK(d == 1.0);
    }
}

TEST_CASE("density is a mean-one martingale")
{
    const TimeGrid g(1.0, 100);
    const std::size_t n = 20000;
    const auto ens = simulate_ensemble(market(0.2, 0.3, 1.0), g, n, 8, 0);
    std::vector<double> DT(n), Dhalf(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto mc = doleans(GeneratorSpec::constant(0.5, 0.0), ens[i]);
        DT[i] = mc.D.back();
        Dhalf[i] = mc.D[50];
    }
    const auto m = summarize(DT);
    CHECK(std::abs(m.mean - 1.0) <= 4.0 * m.std_error);
    const auto h = summarize(Dhalf);
    CHECK(std::abs(h.mean - 1.0) <= 4.0 * h.std_error);
}

TEST_CASE("constant generator density has the closed form")
{
    // D_T = exp(eta1 W1_T - eta1^2 T / 2) for eta = (eta1, 0)
    const TimeGrid g(1.0, 64);
    const auto ens = simulate_ensemble(market(0.2, 0.3, 1.0), g, 16, 5, 1);
    for (const auto& p : ens) {
        double W = 0.0;
        for (double d : p.dW1)
            W += d;
        const auto mc = doleans(GeneratorSpec::worst_case(), p);
        const double eta = -0.15;
        CHECK(mc.D.back() == doctest::Approx(std::exp(eta * W - 0.5 * eta * eta)).epsilon(1e-12));
        for (double e : mc.eta1)
            CHECK(e == doctest::Approx(eta));
        for (double e : mc.eta2)
            CHECK(e == 0.0);
    }
}

TEST_CASE("density rejects mismatched lengths")
{
    const TimeGrid g(1.0, 4);
    const auto ens = simulate_ensemble(market(0.2, 0.3, 1.0), g, 1, 1, 1);
    const std::vector<double> short_eta(3, 0.0), ok(4, 0.0);
    CHECK_THROWS_AS(doleans(short_eta, ok, ens[0]), std::invalid_argument);
}

TEST_CASE("reweighting and drawing under the new measure agree")
{
    const double sigma = 0.2, lambda = 0.3, eta1 = -0.2, K = 1.02;
    const TimeGrid g(1.0, 50);
    const auto c = market(sigma, lambda, 1.0);
    const auto coeffs = std::make_shared<const CoefficientTable>(realize(c, g));
    const std::size_t n = 40000;
    const auto gen = GeneratorSpec::constant(eta1, 0.0);

    std::vector<double> reweighted(n), drawn(n);
    for (std::size_t i = 0; i < n; ++i) {
        PathRequest req;
        req.substream = {31, streams::kReference, i};
        const auto p = simulate_path(coeffs, req);
        reweighted[i] = doleans(gen, p).D.back() * std::min(p.S.back(), K);
        req.substream = {32, streams::kReference, i};
        req.measure = &gen;
        drawn[i] = std::min(simulate_path(coeffs, req).S.back(), K);
    }
    const auto a = summarize(reweighted);
    const auto b = summarize(drawn);
    // under Q the log-return has drift sigma (lambda + eta1) - sigma^2 / 2
    const double exact = expected_min((sigma * (lambda + eta1) - 0.5 * sigma * sigma), sigma, K);
    CHECK(std::abs(a.mean - exact) <= 4.0 * a.std_error);
    CHECK(std::abs(b.mean - exact) <= 4.0 * b.std_error);
}

TEST_CASE("shift by minus lambda_hat gives a driftless asset")
{
    const double sigma = 0.2;
    const TimeGrid g(1.0, 32);
    const auto ens = simulate_ensemble(market(sigma, 0.3, 1.0), g, 8, 2, 1);
    for (const auto& p : ens) {
        const auto mc = doleans(GeneratorSpec::constant(-0.3, 0.0), p);
        const auto q = girsanov_shift(p, mc);
        for (std::size_t k = 0; k < 32; ++k) {
            const double step = std::log(p.S[k + 1] / p.S[k]);
            CHECK(step == doctest::Approx(-0.5 * sigma * sigma * g.dt() + sigma * q.dW1[k]).epsilon(1e-10));
            CHECK(q.dW2[k] == p.dW2[k]);
        }
    }
}

TEST_CASE("penalty values on the reference window")
{
    const TimeGrid g(1.0, 100);
    const auto c = market(0.2, 0.3, 1.0);
    const auto ens = simulate_ensemble(c, g, 3, 1, 1);

    const auto quad = penalty_value(PenaltySpec::quadratic(1.0), GeneratorSpec::worst_case(), 0.0, 1.0, ens);
    for (const auto& e : quad) {
        CHECK_FALSE(e.infinite);
        CHECK(e.estimate == doctest::Approx(0.01125).epsilon(1e-12));
        CHECK(e.std_error == 0.0);
    }
    const auto zero = penalty_value(PenaltySpec::quadratic(1.0), GeneratorSpec::zero(), 0.0, 1.0, ens);
    CHECK(zero.front().estimate == 0.0);
    const auto half = penalty_value(PenaltySpec::quadratic(1.0), GeneratorSpec::worst_case(), 0.5, 1.0, ens);
    CHECK(half.front().estimate == doctest::Approx(0.005625).epsilon(1e-12));

    const auto deg = PenaltySpec::degenerate({{0.0, 1.0, 0.2}});
    const auto admitted = penalty_value(deg, GeneratorSpec::constant(0.2, 0.0), 0.0, 1.0, ens);
    CHECK_FALSE(admitted.front().infinite);
    CHECK(admitted.front().estimate == doctest::Approx(-0.02).epsilon(1e-14));
    const auto other = penalty_value(deg, GeneratorSpec::constant(0.1, 0.0), 0.0, 1.0, ens);
    CHECK(other.front().infinite);
    CHECK_THROWS_AS(penalty_value(deg, GeneratorSpec::zero(), 0.0, 0.5, ens), std::invalid_argument);

    const auto ref = penalty_value(PenaltySpec::reference_only(), GeneratorSpec::zero(), 0.0, 1.0, ens);
    CHECK_FALSE(ref.front().infinite);
    CHECK(penalty_value(PenaltySpec::reference_only(), GeneratorSpec::worst_case(), 0.0, 1.0, ens)
              .front()
              .infinite);

    const auto rep = penalty_report(deg, 0.0, 1.0, other.front());
    CHECK(rep.at("estimate") == "infinite");
}

TEST_CASE("entropic penalty of a constant generator")
{
    // delta * H = delta * |eta|^2 / 2 * (T - t)
    const TimeGrid g(1.0, 50);
    const auto ens = simulate_ensemble(market(0.2, 0.3, 1.0), g, 2, 1, 1);
    PenaltyOptions opt;
    opt.inner_paths = 20000;
    const auto est = penalty_value(PenaltySpec::entropic(2.0), GeneratorSpec::constant(0.3, -0.1), 0.5, 1.0, ens, opt);
    for (const auto& e : est) {
        const double exact = 2.0 * 0.5 * (0.09 + 0.01) * 0.5;
        CHECK(std::abs(e.estimate - exact) <= 4.0 * e.std_error);
        CHECK(e.std_error > 0.0);
    }
    CHECK_THROWS_AS(PenaltySpec::entropic(-1.0), std::invalid_argument);
}

TEST_CASE("penalty cocycle")
{
    const TimeGrid g(1.0, 40);
    const auto coeffs = std::make_shared<const CoefficientTable>(realize(market(0.2, 0.3, 1.0), g));
    PenaltyOptions opt;
    opt.inner_paths = 64;
    const auto quad = cocycle_residual(PenaltySpec::quadratic(1.0), GeneratorSpec::worst_case(), coeffs, 0.5, 32, opt);
    CHECK_FALSE(quad.infinite);
    CHECK(std::abs(quad.residual) < 1e-15);

    // window-wise lambdas that disagree admit no generator on all three windows
    const auto deg = PenaltySpec::degenerate({{0.0, 1.0, 0.2}, {0.0, 0.5, 0.1}, {0.5, 1.0, 0.3}});
    const auto r = cocycle_residual(deg, GeneratorSpec::constant(0.2, 0.0), coeffs, 0.5, 4, opt);
    CHECK(r.infinite);

    // one shared lambda: the penalty is additive over the windows
    const auto flat = PenaltySpec::degenerate({{0.0, 1.0, 0.2}, {0.0, 0.5, 0.2}, {0.5, 1.0, 0.2}});
    const auto f = cocycle_residual(flat, GeneratorSpec::constant(0.2, 0.0), coeffs, 0.5, 4, opt);
    CHECK_FALSE(f.infinite);
    CHECK(std::abs(f.residual) < 1e-15);
}
