#include "rfc/oracle/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace rfc::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json gap_json(const std::optional<NodeGap>& g)
{
    if (!g)
        return nullptr;
    return {{"s", g->s}, {"t", g->t}, {"period", g->period}, {"node", g->node}, {"gap", g->gap}};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size())
        return kInf;
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<double> node_constants(const TreeMarket& market, const MeasureFamily& family, std::size_t t,
                                   std::size_t T, std::vector<TreeSolution>* keep = nullptr)
{
    std::vector<double> c(market.nodes(t));
    for (std::size_t m = 0; m < c.size(); ++m) {
        auto sol = solve_primal(market, family, Utility::log(), 1.0, Window{t, m, T});
        c[m] = sol.levels[0][0].c;
        if (keep)
            keep->push_back(std::move(sol));
    }
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------

nlohmann::json DualityReport::to_json() const
{
    auto lv = nlohmann::json::array();
    for (const auto& l : levels)
        lv.push_back({{"eta_points", l.eta_points}, {"gap", l.gap}});
    return {{"x0", x0},         {"primal", primal},       {"dual_grid", dual_grid},
            {"dual_refined", dual_refined}, {"eta_star", eta_star}, {"gap", gap},
            {"tolerance", tolerance}, {"grid_levels", lv}, {"halves", halves}, {"pass", pass}};
}

DualityReport check_duality(const TreeMarket& market, const MeasureFamily& family, const Utility& utility,
                            double x0, const DualOptions& options, double tolerance,
                            std::size_t refinements)
{
    DualityReport rep;
    rep.x0 = x0;
    rep.tolerance = tolerance;
    const auto primal = solve_primal(market, family, utility, x0);
    const auto dual = solve_dual(market, family, utility, options);
    rep.primal = primal.value;
    rep.dual_grid = dual.grid_conjugate(x0).first;
    const auto [refined, eta] = dual.refined_conjugate(x0);
    rep.dual_refined = refined;
    rep.eta_star = eta;
    rep.gap = refined - primal.value;

    if (utility.kind() == Utility::Kind::Log) {
        const double c = primal.levels[0][0].c;
        const auto xs = log_spaced(0.5, 2.0, 64);
        for (std::size_t L = 0; L <= refinements; ++L) {
            const std::size_t n = (options.eta_points - 1) * (std::size_t{1} << L) + 1;
            DualSolution grid;
            grid.eta = log_spaced(options.eta_min, options.eta_max, n);
            grid.v.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                grid.v[i] = dual.value(grid.eta[i]);
            double sup = 0.0;
            for (double x : xs)
                sup = std::max(sup, grid.grid_conjugate(x).first - (std::log(x) + c));
            rep.levels.push_back({n, sup});
        }
        for (std::size_t L = 1; L < rep.levels.size(); ++L)
            if (rep.levels[L].gap > 0.5 * rep.levels[L - 1].gap + 1e-15)
                rep.halves = false;
    }
    rep.pass = std::abs(rep.gap) <= tolerance && rep.halves;
    return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json DppReport::to_json() const
{
    return {{"max_residual", max_residual}, {"worst", gap_json(worst)},
            {"max_action_gap", max_action_gap}, {"worst_action", gap_json(worst_action)},
            {"tolerance", tolerance}, {"pass", pass}};
}

DppReport check_dpp(const TreeMarket& market, const MeasureFamily& family, double tolerance)
{
    DppReport rep;
    rep.tolerance = tolerance;
    const std::size_t T = market.n_periods();
    for (std::size_t s = 0; s + 1 < T; ++s)
        for (std::size_t t = s + 1; t < T; ++t) {
            std::vector<TreeSolution> at_t;
            const auto c_t = node_constants(market, family, t, T, &at_t);
            for (std::size_t n = 0; n < market.nodes(s); ++n) {
                const auto direct = solve_primal(market, family, Utility::log(), 1.0, Window{s, n, T});
                const auto composed =
                    solve_primal(market, family, Utility::log(), 1.0, Window{s, n, t}, Terminal{c_t, {}});
                const double r = std::abs(direct.levels[0][0].c - composed.levels[0][0].c);
                if (!rep.worst || r > rep.max_residual) {
                    rep.max_residual = r;
                    rep.worst = NodeGap{s, t, s, n, r};
                }
                const auto [first, last] = market.descendants(s, n, t);
                for (std::size_t m = first; m < last; ++m) {
                    const double a = std::abs(direct.at(t, m).fraction - at_t[m].levels[0][0].fraction);
                    if (!rep.worst_action || a > rep.max_action_gap) {
                        rep.max_action_gap = a;
                        rep.worst_action = NodeGap{s, t, t, m, a};
                    }
                }
            }
        }
    rep.pass = rep.max_residual <= tolerance;
    return rep;
}

DppReport check_dpp_general(const TreeMarket& market, const MeasureFamily& family, const Utility& utility,
                            double x0, double tolerance)
{
    DppReport rep;
    rep.tolerance = tolerance;
    const std::size_t T = market.n_periods();
    const auto direct = solve_primal(market, family, utility, x0);
    for (std::size_t t = 1; t < T; ++t) {
        Terminal term;
        term.general = [&](std::size_t node, double x) {
            if (utility.needs_positive_wealth() && !(x > 0.0))
                return -kInf;
            return solve_primal(market, family, utility, x, Window{t, node, T}).value;
        };
        const auto composed = solve_primal(market, family, utility, x0, Window{0, 0, t}, term);
        const double r = std::abs(direct.value - composed.value);
        if (!rep.worst || r > rep.max_residual) {
            rep.max_residual = r;
            rep.worst = NodeGap{0, t, 0, 0, r};
        }
        for (const auto& rec : direct.levels[t]) {
            const auto later = solve_primal(market, family, utility, rec.wealth, Window{t, rec.index, T});
            const double a = std::abs(rec.amount - later.levels[0][0].amount) / std::max(1.0, std::abs(rec.wealth));
            if (!rep.worst_action || a > rep.max_action_gap) {
                rep.max_action_gap = a;
                rep.worst_action = NodeGap{0, t, t, rec.index, a};
            }
        }
    }
    rep.pass = rep.max_residual <= tolerance;
    return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json ConsistencyReport::to_json() const
{
    return {{"T", T},
            {"T_bar", T_bar},
            {"restriction_gap", restriction_gap},
            {"strategy_gap", strategy_gap},
            {"rolling_gap", rolling_gap},
            {"horizon_gap", horizon_gap},
            {"worst_rolling", gap_json(worst_rolling)},
            {"tolerance", tolerance},
            {"restriction", restriction},
            {"strategies", strategies},
            {"rolling", rolling},
            {"pass", pass()}};
}

ConsistencyReport check_time_consistency(const TreeMarket& market, const MeasureFamily& family, std::size_t T,
                                         std::size_t T_bar, double tolerance)
{
    if (!(0 < T && T < T_bar && T_bar <= market.n_periods()))
        throw std::invalid_argument("check_time_consistency: need 0 < T < T_bar <= n_periods");
    ConsistencyReport rep;
    rep.T = T;
    rep.T_bar = T_bar;
    rep.tolerance = tolerance;
    const auto c_T = node_constants(market, family, T, T_bar);
    const auto short_h =
        solve_primal(market, family, Utility::log(), 1.0, Window{0, 0, T}, Terminal{c_T, {}});
    const auto long_h = solve_primal(market, family, Utility::log(), 1.0, Window{0, 0, T_bar});
    for (std::size_t k = 0; k < T; ++k)
        for (std::size_t j = 0; j < market.nodes(k); ++j) {
            const auto& a = short_h.at(k, j);
            const auto& b = long_h.at(k, j);
            rep.restriction_gap = std::max(rep.restriction_gap, max_abs_diff(a.worst_q, b.worst_q));
            rep.strategy_gap = std::max(rep.strategy_gap, std::abs(a.fraction - b.fraction));
        }
    rep.horizon_gap = std::abs(short_h.levels[0][0].fraction - long_h.levels[0][0].fraction);
    for (std::size_t u = 1; u < T_bar; ++u)
        for (std::size_t m = 0; m < market.nodes(u); ++m) {
            const auto later = solve_primal(market, family, Utility::log(), 1.0, Window{u, m, T_bar});
            const double g = std::abs(later.levels[0][0].fraction - long_h.at(u, m).fraction);
            if (!rep.worst_rolling || g > rep.rolling_gap) {
                rep.rolling_gap = g;
                rep.worst_rolling = NodeGap{0, u, u, m, g};
            }
        }
    rep.restriction = rep.restriction_gap <= tolerance;
    rep.strategies = rep.strategy_gap <= tolerance;
    rep.rolling = rep.rolling_gap <= tolerance;
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

using NodeTable = std::vector<std::vector<double>>;                // [period][node]
using KernelTable = std::vector<std::vector<std::vector<double>>>;  // [period][node][branch]

// E^Q[ln X_T] + E^Q[sum of node penalties] + global penalty, by forward
// enumeration from the root with x0.
double evaluate(const TreeMarket& market, double x0, const NodeTable& fractions, const KernelTable& q,
                const NodeTable& penalty, double global_penalty)
{
    const std::size_t T = market.n_periods();
    std::vector<double> prob{1.0}, wealth{x0};
    double pen = global_penalty;
    for (std::size_t k = 0; k < T; ++k) {
        const auto& r = market.period(k).returns;
        const std::size_t b = r.size();
        std::vector<double> np(prob.size() * b), nw(prob.size() * b);
        for (std::size_t j = 0; j < prob.size(); ++j) {
            pen += prob[j] * penalty[k][j];
            for (std::size_t i = 0; i < b; ++i) {
                np[j * b + i] = prob[j] * q[k][j][i];
                nw[j * b + i] = wealth[j] * (1.0 + fractions[k][j] * r[i]);
            }
        }
        prob = std::move(np);
        wealth = std::move(nw);
    }
    double e = 0.0;
    for (std::size_t j = 0; j < prob.size(); ++j)
        e += prob[j] * (wealth[j] > 0.0 ? std::log(wealth[j]) : -kInf);
    return e + pen;
}

NodeTable shape_like(const TreeMarket& market, double fill)
{
    NodeTable t(market.n_periods());
    for (std::size_t k = 0; k < t.size(); ++k)
        t[k].assign(market.nodes(k), fill);
    return t;
}

std::pair<double, double> fraction_bounds(const std::vector<double>& r)
{
    const double hi = -1.0 / *std::min_element(r.begin(), r.end());
    const double lo = -1.0 / *std::max_element(r.begin(), r.end());
    const double pad = 1e-6 * (hi - lo);
    return {lo + pad, hi - pad};
}

}  // namespace

nlohmann::json SaddleChainReport::to_json() const
{
    return {{"value", value},       {"solver_value", solver_value}, {"max_pi_excess", max_pi_excess},
            {"max_q_deficit", max_q_deficit}, {"policies", policies},   {"measures", measures},
            {"tolerance", tolerance}, {"pass", pass}};
}

SaddleChainReport check_saddle_chain(const TreeMarket& market, const MeasureFamily& family, double x0,
                                     std::size_t n_random, std::uint64_t seed, double tolerance)
{
    const auto sol = solve_primal(market, family, Utility::log(), x0);
    const std::size_t T = market.n_periods();
    SaddleChainReport rep;
    rep.tolerance = tolerance;
    rep.solver_value = sol.value;

    NodeTable pi_star = shape_like(market, 0.0), pen_star = shape_like(market, 0.0);
    KernelTable q_star(T);
    for (std::size_t k = 0; k < T; ++k) {
        q_star[k].resize(market.nodes(k));
        for (std::size_t j = 0; j < market.nodes(k); ++j) {
            const auto& rec = sol.at(k, j);
            pi_star[k][j] = rec.fraction;
            q_star[k][j] = rec.worst_q;
            pen_star[k][j] = rec.worst_penalty;
        }
    }
    rep.value = evaluate(market, x0, pi_star, q_star, pen_star, 0.0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // Strategies against Q*.
    auto against_q_star = [&](const NodeTable& pi) {
        rep.max_pi_excess = std::max(rep.max_pi_excess, evaluate(market, x0, pi, q_star, pen_star, 0.0) - rep.value);
        ++rep.policies;
    };
    for (std::size_t g = 0; g <= 20; ++g) {
        NodeTable pi = shape_like(market, 0.0);
        for (std::size_t k = 0; k < T; ++k) {
            const auto [lo, hi] = fraction_bounds(market.period(k).returns);
            std::fill(pi[k].begin(), pi[k].end(), lo + (hi - lo) * static_cast<double>(g) / 20.0);
        }
        against_q_star(pi);
    }
    for (double scale : {1e-3, 1e-1})
        for (std::size_t n = 0; n < n_random; ++n) {
            NodeTable pi = pi_star;
            for (std::size_t k = 0; k < T; ++k) {
                const auto [lo, hi] = fraction_bounds(market.period(k).returns);
                for (double& th : pi[k])
                    th = std::clamp(th + scale * (hi - lo) * unit(rng), lo, hi);
            }
            against_q_star(pi);
        }

    // Measures against pi*.
    auto against_pi_star = [&](const KernelTable& q, const NodeTable& pen, double global) {
        rep.max_q_deficit = std::max(rep.max_q_deficit, rep.value - evaluate(market, x0, pi_star, q, pen, global));
        ++rep.measures;
    };
    switch (family.kind()) {
    case MeasureFamily::Kind::Kernels: {
        for (std::size_t n = 0; n < n_random; ++n) {
            KernelTable q(T);
            NodeTable pen = shape_like(market, 0.0);
            for (std::size_t k = 0; k < T; ++k) {
                const auto& ks = family.kernels_at(k);
                q[k].resize(market.nodes(k));
                for (std::size_t j = 0; j < q[k].size(); ++j) {
                    std::vector<double> w(ks.size());
                    if (n % 2 == 0) {
                        w[rng() % ks.size()] = 1.0;
                    } else {
                        double z = 0.0;
                        for (double& v : w)
                            z += v = unit(rng) + 1.0;
                        for (double& v : w)
                            v /= z;
                    }
                    q[k][j] = mix_kernels(ks, w, &pen[k][j]);
                }
            }
            against_pi_star(q, pen, 0.0);
        }
        break;
    }
    case MeasureFamily::Kind::Entropic: {
        const double delta = family.entropic_delta();
        for (std::size_t n = 0; n < n_random; ++n) {
            KernelTable q(T);
            NodeTable pen = shape_like(market, 0.0);
            for (std::size_t k = 0; k < T; ++k) {
                const auto& per = market.period(k);
                q[k].resize(market.nodes(k));
                for (std::size_t j = 0; j < q[k].size(); ++j) {
                    const double tau = 3.0 * unit(rng);
                    std::vector<double> qq(per.p.size());
                    double z = 0.0;
                    for (std::size_t i = 0; i < qq.size(); ++i)
                        z += qq[i] = per.p[i] * std::exp(tau * per.returns[i]);
                    for (double& v : qq)
                        v /= z;
                    pen[k][j] = delta * relative_entropy(qq, per.p);
                    q[k][j] = std::move(qq);
                }
            }
            against_pi_star(q, pen, 0.0);
        }
        break;
    }
    case MeasureFamily::Kind::Scenarios: {
        // Linear in the mixture weights, so pure scenarios are the extreme points.
        const auto& set = family.scenarios_for(0, T);
        for (const auto& sc : set.scenarios) {
            KernelTable q(T);
            for (std::size_t k = 0; k < T; ++k)
                q[k].assign(market.nodes(k), sc.kernels[k]);
            against_pi_star(q, shape_like(market, 0.0), sc.penalty);
        }
        break;
    }
    }
    rep.pass = rep.max_pi_excess <= tolerance && rep.max_q_deficit <= tolerance &&
               std::abs(rep.value - rep.solver_value) <= tolerance;
    return rep;
}

// ---------------------------------------------------------------------------

LeafWealth leaf_wealth(const TreeMarket& market, const TreeSolution& solution)
{
    if (solution.window.t0 != 0 || solution.window.T != market.n_periods())
        throw std::invalid_argument("leaf_wealth: needs a whole-tree solution");
    LeafWealth out;
    const std::size_t T = market.n_periods();
    const auto& last = solution.levels.back();
    const auto& r = market.period(T - 1).returns;
    // Reference probabilities of the nodes at T - 1.
    std::vector<double> prob{1.0};
    for (std::size_t k = 0; k + 1 < T; ++k) {
        const auto& p = market.period(k).p;
        std::vector<double> np(prob.size() * p.size());
        for (std::size_t j = 0; j < prob.size(); ++j)
            for (std::size_t i = 0; i < p.size(); ++i)
                np[j * p.size() + i] = prob[j] * p[i];
        prob = std::move(np);
    }
    const auto& p = market.period(T - 1).p;
    for (std::size_t j = 0; j < last.size(); ++j)
        for (std::size_t i = 0; i < r.size(); ++i) {
            out.wealth.push_back(last[j].wealth + last[j].amount * r[i]);
            out.prob.push_back(prob[j] * p[i]);
        }
    return out;
}

nlohmann::json EntropicReport::to_json() const
{
    return {{"delta", delta}, {"robust_value", robust_value}, {"certainty_equivalent", certainty_equivalent},
            {"gap", gap}, {"tolerance", tolerance}, {"pass", pass}};
}

EntropicReport check_entropic_reduction(const TreeMarket& market, double delta, const Utility& utility,
                                        double x0, double tolerance)
{
    EntropicReport rep;
    rep.delta = delta;
    rep.tolerance = tolerance;
    const auto sol = solve_primal(market, MeasureFamily::entropic(delta), utility, x0);
    rep.robust_value = sol.value;
    const auto leaves = leaf_wealth(market, sol);
    std::vector<double> u(leaves.wealth.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = utility.value(leaves.wealth[i]);
    const double umin = *std::min_element(u.begin(), u.end());
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += leaves.prob[i] * std::exp(-(u[i] - umin) / delta);
    rep.certainty_equivalent = umin - delta * std::log(s);
    rep.gap = rep.robust_value - rep.certainty_equivalent;
    rep.pass = std::abs(rep.gap) <= tolerance;
    return rep;
}

}  // namespace rfc::oracle
