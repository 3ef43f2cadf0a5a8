#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfc/coefficients.hpp"
#include "rfc/generator.hpp"
#include "rfc/grid.hpp"
#include "rfc/rng.hpp"
#include "rfc/step_state.hpp"
#include "rfc/strategies.hpp"

namespace rfc {

/// One discretized scenario of the reference market. dW1/dW2 are increments
/// of the reference-measure Brownian motions; S has n_steps + 1 entries.
/// Steps before `start` belong to a frozen prefix (zero increments, constant S).
struct PathBundle {
    TimeGrid grid;
    std::vector<double> dW1;
    std::vector<double> dW2;
    std::vector<double> S;
    std::shared_ptr<const CoefficientTable> coeffs;
    std::uint64_t path_id = 0;
    std::uint64_t seed = 0;
    std::size_t start = 0;

    MarketState state(std::size_t k) const;
};

struct WealthPath {
    std::vector<double> X;
    std::string strategy_id;
};

/// How to draw a single scenario.
struct PathRequest {
    Substream substream;
    std::size_t start = 0;       ///< first simulated step
    double S_start = 1.0;        ///< asset level at t_start
    /// When set, the scenario is drawn under Q^eta: the stored reference
    /// increments are dW = dW^eta + eta dt with dW^eta ~ N(0, dt).
    const GeneratorSpec* measure = nullptr;
    bool antithetic = false;     ///< negate every normal draw
};

/// Exact log-scheme S_{k+1} = S_k exp((sigma lambda_hat - sigma^2/2) dt + sigma dW1).
PathBundle simulate_path(std::shared_ptr<const CoefficientTable> coeffs, const PathRequest& request);

/// n_paths scenarios; path i uses substream (seed, reference stream, i), so the
/// result is a pure function of the arguments regardless of `threads`.
std::vector<PathBundle> simulate_ensemble(const MarketCoefficients& coeffs, const TimeGrid& grid,
                                          std::size_t n_paths, std::uint64_t seed,
                                          int threads = 0, double S0 = 1.0);

/// X_{k+1} = X_k exp((pi sigma lambda_hat - pi^2 sigma^2 / 2) dt + pi sigma dW1).
WealthPath wealth_from_strategy(const PathBundle& bundle, const Strategy& strategy, double x0);

/// ln X_T along the bundle without materializing the path.
double terminal_log_wealth(const PathBundle& bundle, const Strategy& strategy, double x0);

/// ln X_to given X_from at step `from`.
double log_wealth_between(const PathBundle& bundle, const Strategy& strategy, double x_from,
                          std::size_t from, std::size_t to);

/// CSV rows: path_id,k,t,S,dW1,dW2 (dW columns empty on the last grid point).
void write_ensemble_csv(std::ostream& out, std::span<const PathBundle> ensemble);

nlohmann::json ensemble_manifest(const MarketCoefficients& coeffs, const TimeGrid& grid,
                                 std::size_t n_paths, std::uint64_t seed);

}  // namespace rfc
