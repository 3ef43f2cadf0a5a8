#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfc/oracle/family.hpp"
#include "rfc/oracle/solver.hpp"
#include "rfc/oracle/tree.hpp"

namespace rfc::oracle {

struct GridLevel {
    std::size_t eta_points = 0;
    double gap = 0.0;  ///< sup over the test wealths of the grid conjugate error
};

struct DualityReport {
    double x0 = 1.0;
    double primal = 0.0;
    double dual_grid = 0.0;
    double dual_refined = 0.0;
    double eta_star = 0.0;
    double gap = 0.0;  ///< dual_refined - primal
    double tolerance = 0.0;
    std::vector<GridLevel> levels;  ///< log utility only
    bool halves = true;
    bool pass = false;

    nlohmann::json to_json() const;
};

/// |u(x0) - min_eta (v(eta) + x0 eta)| with grid and refined conjugates;
/// for log utility also the grid-refinement study on eta grids with
/// (N - 1) 2^L + 1 points, L = 0 .. refinements.
DualityReport check_duality(const TreeMarket& market, const MeasureFamily& family,
                            const Utility& utility, double x0, const DualOptions& options = {},
                            double tolerance = 1e-6, std::size_t refinements = 3);

struct NodeGap {
    std::size_t s = 0;
    std::size_t t = 0;
    std::size_t period = 0;
    std::size_t node = 0;
    double gap = 0.0;
};

struct DppReport {
    double max_residual = 0.0;
    std::optional<NodeGap> worst;       ///< node with the largest value residual
    double max_action_gap = 0.0;        ///< optimal fractions at t: horizon-T plan made at s vs at t
    std::optional<NodeGap> worst_action;
    double tolerance = 1e-8;
    bool pass = false;

    nlohmann::json to_json() const;
};

/// Direct backward induction on [s, T] against the composition through every
/// intermediate t (value at t, then the [s, t] problem with that terminal
/// criterion), at every node of every s. Log utility, any family.
DppReport check_dpp(const TreeMarket& market, const MeasureFamily& family, double tolerance = 1e-8);

/// Same comparison for a general utility, started at the root only; the
/// terminal criterion at t is re-solved on demand. At most 3 periods.
DppReport check_dpp_general(const TreeMarket& market, const MeasureFamily& family,
                            const Utility& utility, double x0, double tolerance = 1e-8);

struct ConsistencyReport {
    std::size_t T = 0;
    std::size_t T_bar = 0;
    double restriction_gap = 0.0;  ///< (a) worst kernels, horizon T vs horizon T_bar, on periods < T
    double strategy_gap = 0.0;     ///< (b) fractions, horizon T vs horizon T_bar, on periods < T
    double rolling_gap = 0.0;      ///< (c) fractions planned at 0 vs re-planned at u, horizon T_bar
    double horizon_gap = 0.0;      ///< root fraction, horizon T vs horizon T_bar
    std::optional<NodeGap> worst_rolling;
    double tolerance = 1e-8;
    bool restriction = false;
    bool strategies = false;
    bool rolling = false;

    bool pass() const { return restriction && strategies && rolling; }
    nlohmann::json to_json() const;
};

/// Log utility. The horizon-T problem uses the forward criterion at T, i.e.
/// the terminal constants of the [T, T_bar] problem.
ConsistencyReport check_time_consistency(const TreeMarket& market, const MeasureFamily& family,
                                         std::size_t T, std::size_t T_bar, double tolerance = 1e-8);

struct SaddleChainReport {
    double value = 0.0;       ///< value(pi*, Q*)
    double solver_value = 0.0;
    double max_pi_excess = 0.0;   ///< max over pi of value(pi, Q*) - value(pi*, Q*)
    double max_q_deficit = 0.0;   ///< max over Q of value(pi*, Q*) - value(pi*, Q)
    std::size_t policies = 0;
    std::size_t measures = 0;
    double tolerance = 1e-9;
    bool pass = false;

    nlohmann::json to_json() const;
};

/// value(pi, Q*) <= value(pi*, Q*) <= value(pi*, Q) for perturbed and
/// constant-fraction policies pi and for family measures Q. Log utility.
SaddleChainReport check_saddle_chain(const TreeMarket& market, const MeasureFamily& family, double x0,
                                     std::size_t n_random = 64, std::uint64_t seed = 7,
                                     double tolerance = 1e-9);

struct EntropicReport {
    double delta = 1.0;
    double robust_value = 0.0;
    double certainty_equivalent = 0.0;
    double gap = 0.0;
    double tolerance = 1e-8;
    bool pass = false;

    nlohmann::json to_json() const;
};

/// Robust value with delta KL penalties against -delta ln E_p[exp(-U(X*_T) / delta)]
/// at the optimal terminal wealth, for log or exponential utility.
EntropicReport check_entropic_reduction(const TreeMarket& market, double delta, const Utility& utility,
                                        double x0, double tolerance = 1e-8);

/// Terminal wealth of the solution's policy on every leaf, with reference
/// path probabilities.
struct LeafWealth {
    std::vector<double> wealth;
    std::vector<double> prob;
};
LeafWealth leaf_wealth(const TreeMarket& market, const TreeSolution& solution);

}  // namespace rfc::oracle
