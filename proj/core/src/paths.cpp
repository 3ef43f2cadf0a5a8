#include "rfc/paths.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rfc/parallel.hpp"

namespace rfc {

MarketState PathBundle::state(std::size_t k) const
{
    MarketState s;
    s.k = k;
    s.t = grid.time(k);
    s.S = S[k];
    if (k < coeffs->size()) {
        s.sigma = coeffs->sigma[k];
        s.lambda_hat = coeffs->lambda_hat[k];
        s.delta = coeffs->delta[k];
    }
    return s;
}

PathBundle simulate_path(std::shared_ptr<const CoefficientTable> coeffs, const PathRequest& req)
{
    if (!coeffs)
        throw std::invalid_argument("simulate_path: missing coefficients");
    const TimeGrid& grid = coeffs->grid;
    const std::size_t n = grid.n_steps();
    if (req.start > n)
        throw std::invalid_argument("simulate_path: start index past the horizon");
    if (!(req.S_start > 0.0) || !std::isfinite(req.S_start))
        throw std::invalid_argument("simulate_path: initial asset level must be positive");

    PathBundle b{grid, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                 std::vector<double>(n + 1, req.S_start), coeffs, req.substream.path,
                 req.substream.seed, req.start};
    const double dt = grid.dt();
    const double sqdt = std::sqrt(dt);
    const double sign = req.antithetic ? -1.0 : 1.0;
    double log_s = std::log(req.S_start);
    for (std::size_t k = req.start; k < n; ++k) {
        const auto z = normal_pair(req.substream, static_cast<std::uint32_t>(k));
        double dw1 = sign * z[0] * sqdt;
        double dw2 = sign * z[1] * sqdt;
        if (req.measure != nullptr) {
            const auto eta = req.measure->at(b.state(k), grid);
            dw1 += eta[0] * dt;
            dw2 += eta[1] * dt;
        }
        const double sigma = coeffs->sigma[k];
        const double lam = coeffs->lambda_hat[k];
        b.dW1[k] = dw1;
        b.dW2[k] = dw2;
        log_s += (sigma * lam - 0.5 * sigma * sigma) * dt + sigma * dw1;
        b.S[k + 1] = std::exp(log_s);
    }
    return b;
}

std::vector<PathBundle> simulate_ensemble(const MarketCoefficients& coeffs, const TimeGrid& grid,
                                          std::size_t n_paths, std::uint64_t seed, int threads,
                                          double S0)
{
    if (n_paths == 0)
        throw std::invalid_argument("simulate_ensemble: n_paths must be >= 1");
    auto table = std::make_shared<const CoefficientTable>(realize(coeffs, grid));
    std::vector<PathBundle> out(n_paths, PathBundle{grid, {}, {}, {}, table, 0, seed, 0});
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            PathRequest req;
            req.substream = {seed, streams::kReference, i};
            req.S_start = S0;
            out[i] = simulate_path(table, req);
        }
    });
    return out;
}

namespace {

template <typename Visit>
double accumulate_log_wealth(const PathBundle& b, const Strategy& strategy, double x0,
                             std::size_t from, std::size_t to, Visit visit)
{
    if (!(x0 > 0.0) || !std::isfinite(x0))
        throw std::invalid_argument("wealth: initial wealth must be positive");
    const double dt = b.grid.dt();
    double log_x = std::log(x0);
    double x = x0;
    for (std::size_t k = from; k < to; ++k) {
        StepState st;
        static_cast<MarketState&>(st) = b.state(k);
        st.X = x;
        const double pi = strategy.fraction(st);
        const double vol = pi * st.sigma;
        log_x += (vol * st.lambda_hat - 0.5 * vol * vol) * dt + vol * b.dW1[k];
        x = std::exp(log_x);
        visit(k + 1, x);
    }
    return log_x;
}

}  // namespace

WealthPath wealth_from_strategy(const PathBundle& bundle, const Strategy& strategy, double x0)
{
    WealthPath w{std::vector<double>(bundle.grid.n_steps() + 1, x0), strategy.id()};
    accumulate_log_wealth(bundle, strategy, x0, bundle.start, bundle.grid.n_steps(), [&](std::size_t k, double x) { w.X[k] = x; });
    return w;
}

double terminal_log_wealth(const PathBundle& bundle, const Strategy& strategy, double x0)
{
    return accumulate_log_wealth(bundle, strategy, x0, bundle.start, bundle.grid.n_steps(),
                                 [](std::size_t, double) {});
}

double log_wealth_between(const PathBundle& bundle, const Strategy& strategy, double x_from,
                          std::size_t from, std::size_t to)
{
    if (from > to || to > bundle.grid.n_steps())
        throw std::invalid_argument("log_wealth_between: need from <= to <= n_steps");
    return accumulate_log_wealth(bundle, strategy, x_from, from, to, [](std::size_t, double) {});
}

void write_ensemble_csv(std::ostream& out, std::span<const PathBundle> ensemble)
{
    out << "path_id,k,t,S,dW1,dW2\n";
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& b : ensemble) {
        const std::size_t n = b.grid.n_steps();
        for (std::size_t k = 0; k <= n; ++k) {
            out << b.path_id << ',' << k << ',' << b.grid.time(k) << ',' << b.S[k] << ',';
            if (k < n)
                out << b.dW1[k] << ',' << b.dW2[k];
            else
                out << ',';
            out << '\n';
        }
    }
    out.precision(old_precision);
}

nlohmann::json ensemble_manifest(const MarketCoefficients& coeffs, const TimeGrid& grid,
                                 std::size_t n_paths, std::uint64_t seed)
{
    return {{"seed", seed},
            {"n_paths", n_paths},
            {"grid", {{"horizon", grid.horizon()}, {"n_steps", grid.n_steps()}}},
            {"coefficients", coeffs.describe()},
            {"generator", "philox4x32-10 / box-muller"}};
}

}  // namespace rfc
