#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfc/oracle/family.hpp"
#include "rfc/oracle/node_problems.hpp"
#include "rfc/oracle/tree.hpp"

namespace rfc::oracle {

/// Terminal criterion at the horizon node: for log utility ln x + c[node];
/// otherwise `general(node, x)` when set, else the utility itself.
struct Terminal {
    std::vector<double> log_const;  ///< empty means 0 at every node
    std::function<double(std::size_t, double)> general;
};

/// The problem max_pi inf_Q E^Q[U_T(X_T)] + gamma_{t0,T}(Q) started at one
/// node of time t0.
struct Window {
    std::size_t t0 = 0;
    std::size_t node = 0;
    std::size_t T = 0;
};

struct NodeRecord {
    std::size_t period = 0;
    std::size_t index = 0;
    double wealth = 0.0;    ///< wealth reached under the optimal policy
    double value = 0.0;     ///< value function at that wealth
    double amount = 0.0;    ///< optimal amount invested
    double fraction = 0.0;  ///< amount / wealth
    /// Log utility: value - ln wealth, independent of wealth.
    double c = 0.0;
    std::vector<double> worst_q;
    std::vector<double> weights;
    double worst_penalty = 0.0;
};

class TreeSolution {
public:
    Window window;
    Utility utility;
    double x0 = 1.0;
    double value = 0.0;
    /// levels[d][j]: node j of the subtree at time t0 + d (d = 0 .. T - t0 - 1).
    std::vector<std::vector<NodeRecord>> levels;
    /// Scenario families: optimal global mixture weights at the root.
    std::vector<double> scenario_weights;

    const NodeRecord& at(std::size_t period, std::size_t node) const;
    /// Value at the root as a function of initial wealth (log utility only).
    double log_value(double x) const;

    nlohmann::json to_json() const;
};

/// Backward induction. Log utility uses the homothetic form u = ln x + c at
/// every node and handles every family; power and exponential utilities use
/// an exact on-demand recursion limited to 3 periods and to kernel or
/// entropic families.
TreeSolution solve_primal(const TreeMarket& market, const MeasureFamily& family,
                          const Utility& utility, double x0, const Window& window,
                          const Terminal& terminal = {});
/// Whole-tree problem from the root.
TreeSolution solve_primal(const TreeMarket& market, const MeasureFamily& family,
                          const Utility& utility, double x0);

struct DualOptions {
    std::size_t eta_points = 2000;
    double eta_min = 1e-3;
    double eta_max = 1e3;
    DualSweep sweep;
    /// Workers for the eta grid (0: all); results do not depend on it.
    int threads = 0;
};

struct DualMinimizer {
    std::size_t period = 0;
    std::size_t index = 0;
    std::vector<double> q;
    std::vector<double> m;
    std::vector<double> weights;
    double s = 0.0;
};

struct DualSolution {
    std::vector<double> eta;
    std::vector<double> v;
    /// v(eta) at any eta > 0 (same accuracy as the grid values).
    std::function<double(double)> value;
    /// Log utility: v(eta) = -ln eta - 1 + D.
    std::optional<double> D;
    /// Minimizing (Q, Z) kernels, root first, for every node problem solved.
    std::vector<DualMinimizer> minimizers;

    /// min over the grid of v(eta) + x eta and its argmin.
    std::pair<double, double> grid_conjugate(double x) const;
    /// Grid minimum refined by golden section in ln eta around the best node.
    std::pair<double, double> refined_conjugate(double x) const;
};

/// Dual value field v(eta; 0, T). Log utility handles any depth with 2- or
/// 3-branch periods; other utilities are limited to one period.
DualSolution solve_dual(const TreeMarket& market, const MeasureFamily& family,
                        const Utility& utility, const DualOptions& options = {},
                        const Terminal& terminal = {});

std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/// CSV rows eta,v.
void write_dual_csv(std::ostream& out, const DualSolution& dual);

}  // namespace rfc::oracle
