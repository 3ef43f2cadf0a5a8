#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfc/oracle/tree.hpp"

namespace rfc::oracle {

/// An alternative one-step branch distribution with its one-step penalty.
struct Kernel {
    std::vector<double> q;
    double penalty = 0.0;
    std::string label;
};

/// A global alternative model on [t, T]: one kernel per period, used at
/// every node of that period, and a single penalty for the whole window.
struct Scenario {
    std::vector<std::vector<double>> kernels;
    double penalty = 0.0;
    std::string label;
};

/// The scenarios admitted when investing at t for horizon T.
struct ScenarioSet {
    std::size_t t = 0;
    std::size_t T = 0;
    std::vector<Scenario> scenarios;
};

/// Measure families on a tree.
///  - kernels: per-period finite kernel sets; measures are built node by
///    node (closed under pasting) and penalties add along the path.
///  - entropic: every equivalent kernel, penalty delta * KL(q || p) per step.
///  - scenarios: window-specific lists of global models with constant
///    penalties; mixtures are taken globally, never node by node.
class MeasureFamily {
public:
    /// One kernel list per period.
    static MeasureFamily kernels(std::vector<std::vector<Kernel>> per_period);
    /// Only the reference kernel, penalty 0.
    static MeasureFamily reference(const TreeMarket& market);
    static MeasureFamily entropic(double delta);
    static MeasureFamily scenarios(std::vector<ScenarioSet> sets);

    enum class Kind { Kernels, Entropic, Scenarios };
    Kind kind() const noexcept { return static_cast<Kind>(repr_.index()); }

    const std::vector<Kernel>& kernels_at(std::size_t period) const;
    double entropic_delta() const;
    /// Throws when no set is tabulated for (t, T).
    const ScenarioSet& scenarios_for(std::size_t t, std::size_t T) const;
    const std::vector<ScenarioSet>& scenario_sets() const;

    /// Checks shapes against the market: kernel lengths, positivity (every
    /// kernel equivalent to p), sums, and window coverage.
    void validate(const TreeMarket& market) const;

    nlohmann::json describe() const;

private:
    struct Kernels {
        std::vector<std::vector<Kernel>> per_period;
    };
    struct Entropic {
        double delta;
    };
    struct Scenarios {
        std::vector<ScenarioSet> sets;
    };
    std::variant<Kernels, Entropic, Scenarios> repr_{Entropic{1.0}};
};

/// Up-probability standing in for a constant market price of risk lambda on
/// a symmetric two-branch period: (1 + lambda / sqrt(1 + lambda^2)) / 2.
double degenerate_up_probability(double lambda);

/// One-period log-optimal growth max_theta E^q[ln(1 + theta r)] on symmetric
/// returns (+a, -a): q ln(2q) + (1 - q) ln(2(1 - q)).
double symmetric_log_growth(double q_up);

struct LambdaWindow {
    std::size_t t = 0;
    std::size_t T = 0;
    double lambda = 0.0;
};

/// The singleton-per-window family: for each (t, T), the single model with
/// up-probability degenerate_up_probability(lambda) in every period and the
/// penalty -(T - t) * symmetric_log_growth, the negative of its log-optimal
/// excess. Requires symmetric two-branch periods.
MeasureFamily degenerate_family(const TreeMarket& market, const std::vector<LambdaWindow>& table);

}  // namespace rfc::oracle
