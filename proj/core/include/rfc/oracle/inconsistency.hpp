#pragma once

#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfc/grid.hpp"
#include "rfc/measures.hpp"

namespace rfc::oracle {

/// Investing at t for horizon T against the single admitted model with
/// constant price of risk lambda_{t,T} and penalty -(T - t) lambda^2 / 2.
struct WindowIdentity {
    double t = 0.0;
    double T = 0.0;
    double lambda = 0.0;
    double pi = 0.0;        ///< lambda / sigma on [t, T)
    double penalty = 0.0;
    double residual = 0.0;  ///< (T - t) lambda^2 / 2 + penalty
};

struct StrategyRow {
    double t = 0.0;
    double T = 0.0;
    double u = 0.0;
    double pi = 0.0;
};

struct InconsistencyReport {
    double sigma = 0.0;
    std::vector<WindowIdentity> windows;
    std::vector<StrategyRow> strategies;
    double max_residual = 0.0;
    /// Same horizon, later start, different fraction on the overlap.
    bool strategy_inconsistent = false;
    /// Same start, different horizon, different fraction.
    bool horizon_inconsistent = false;

    nlohmann::json to_json() const;
};

/// Strategy table on the grid times u in [t, T) of every tabulated window
/// and the value identity u(x; t, T) = ln x.
InconsistencyReport inconsistency_demo_continuous(const std::vector<LambdaEntry>& table, double sigma,
                                                  const TimeGrid& grid);

/// CSV rows t,T,u,pi.
void write_strategy_csv(std::ostream& out, const InconsistencyReport& report);

}  // namespace rfc::oracle
