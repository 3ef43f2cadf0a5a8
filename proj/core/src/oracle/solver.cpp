#include "rfc/oracle/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "rfc/parallel.hpp"

namespace rfc::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_window(const TreeMarket& market, const Window& w)
{
    if (!(w.t0 < w.T) || w.T > market.n_periods())
        throw std::invalid_argument("tree window must satisfy t0 < T <= n_periods");
    if (w.node >= market.nodes(w.t0))
        throw std::invalid_argument("tree window: node index out of range");
}

double terminal_const(const Terminal& term, std::size_t node)
{
    return term.log_const.empty() ? 0.0 : term.log_const.at(node);
}

std::vector<std::vector<NodeRecord>> empty_levels(const TreeMarket& market, const Window& w)
{
    std::vector<std::vector<NodeRecord>> levels;
    for (std::size_t k = w.t0; k < w.T; ++k) {
        const auto [first, last] = market.descendants(w.t0, w.node, k);
        std::vector<NodeRecord> lvl(last - first);
        for (std::size_t j = first; j < last; ++j) {
            lvl[j - first].period = k;
            lvl[j - first].index = j;
        }
        levels.push_back(std::move(lvl));
    }
    return levels;
}

// Fills wealth, amount and value along the optimal log policy.
void forward_log(const TreeMarket& market, TreeSolution& sol)
{
    const auto& w = sol.window;
    sol.levels[0][0].wealth = sol.x0;
    for (std::size_t d = 0; d < sol.levels.size(); ++d) {
        const std::size_t k = w.t0 + d;
        const std::size_t first = sol.levels[d].front().index;
        for (auto& rec : sol.levels[d]) {
            rec.amount = rec.fraction * rec.wealth;
            rec.value = std::log(rec.wealth) + rec.c;
            if (d + 1 == sol.levels.size())
                continue;
            const auto& r = market.period(k).returns;
            const std::size_t next_first = first * market.branching(k);
            for (std::size_t i = 0; i < r.size(); ++i) {
                auto& child = sol.levels[d + 1][rec.index * market.branching(k) + i - next_first];
                child.wealth = rec.wealth * (1.0 + rec.fraction * r[i]);
            }
        }
    }
    sol.value = sol.levels[0][0].value;
}

// Log utility with kernel or entropic families: node-by-node backward induction.
TreeSolution solve_log_nodewise(const TreeMarket& market, const MeasureFamily& family, double x0,
                                const Window& w, const Terminal& term)
{
    TreeSolution sol;
    sol.window = w;
    sol.utility = Utility::log();
    sol.x0 = x0;
    sol.levels = empty_levels(market, w);
    for (std::size_t d = sol.levels.size(); d-- > 0;) {
        const std::size_t k = w.t0 + d;
        const std::size_t b = market.branching(k);
        for (auto& rec : sol.levels[d]) {
            std::vector<double> c(b);
            for (std::size_t i = 0; i < b; ++i) {
                const std::size_t child = rec.index * b + i;
                if (d + 1 == sol.levels.size())
                    c[i] = terminal_const(term, child);
                else
                    c[i] = sol.at(k + 1, child).c;
            }
            const LogNode node = family.kind() == MeasureFamily::Kind::Entropic
                                     ? log_node_entropic(market.period(k), family.entropic_delta(), c)
                                     : log_node_kernels(market.period(k), family.kernels_at(k), c);
            rec.c = node.c;
            rec.fraction = node.theta;
            rec.worst_q = node.worst_q;
            rec.weights = node.weights;
            rec.worst_penalty = node.worst_penalty;
        }
    }
    forward_log(market, sol);
    return sol;
}

// E^Q[ln(X_T / x) + c_T] + penalty for one global scenario, following the
// fractions already stored in `sol`.
double scenario_value(const TreeMarket& market, const TreeSolution& sol, const Scenario& sc,
                      const Terminal& term)
{
    const auto& w = sol.window;
    std::vector<double> prob{1.0}, logw{0.0};
    std::size_t first = w.node;
    for (std::size_t d = 0; d < sol.levels.size(); ++d) {
        const auto& r = market.period(w.t0 + d).returns;
        const std::size_t b = r.size();
        std::vector<double> np(prob.size() * b), nl(prob.size() * b);
        for (std::size_t j = 0; j < prob.size(); ++j) {
            const double th = sol.levels[d][j].fraction;
            for (std::size_t i = 0; i < b; ++i) {
                np[j * b + i] = prob[j] * sc.kernels[d][i];
                nl[j * b + i] = logw[j] + std::log1p(th * r[i]);
            }
        }
        prob = std::move(np);
        logw = std::move(nl);
        first *= b;
    }
    double e = sc.penalty;
    for (std::size_t j = 0; j < prob.size(); ++j)
        e += prob[j] * (logw[j] + terminal_const(term, first + j));
    return e;
}

// Log utility with a scenario family: min over global mixtures of the
// expected-utility value under each mixture.
TreeSolution solve_log_scenarios(const TreeMarket& market, const MeasureFamily& family, double x0,
                                 const Window& w, const Terminal& term)
{
    const auto& set = family.scenarios_for(w.t0, w.T);
    const std::size_t K = set.scenarios.size();

    auto evaluate = [&](const std::vector<double>& weights) {
        TreeSolution sol;
        sol.window = w;
        sol.utility = Utility::log();
        sol.x0 = x0;
        sol.levels = empty_levels(market, w);
        // Posterior scenario weights at every node, top-down.
        std::vector<std::vector<std::vector<double>>> post(sol.levels.size());
        post[0].push_back(weights);
        for (std::size_t d = 0; d < sol.levels.size(); ++d) {
            const std::size_t k = w.t0 + d;
            const std::size_t b = market.branching(k);
            for (std::size_t j = 0; j < sol.levels[d].size(); ++j) {
                auto& rec = sol.levels[d][j];
                const auto& pw = post[d][j];
                double z = 0.0;
                for (double v : pw)
                    z += v;
                std::vector<double> q(b, 0.0);
                rec.weights.resize(K);
                for (std::size_t s = 0; s < K; ++s) {
                    rec.weights[s] = pw[s] / z;
                    for (std::size_t i = 0; i < b; ++i)
                        q[i] += rec.weights[s] * set.scenarios[s].kernels[d][i];
                }
                rec.worst_q = q;
                if (d + 1 < sol.levels.size())
                    for (std::size_t i = 0; i < b; ++i) {
                        std::vector<double> child(K);
                        for (std::size_t s = 0; s < K; ++s)
                            child[s] = rec.weights[s] * set.scenarios[s].kernels[d][i];
                        post[d + 1].push_back(std::move(child));
                    }
            }
        }
        for (std::size_t d = sol.levels.size(); d-- > 0;) {
            const std::size_t k = w.t0 + d;
            const std::size_t b = market.branching(k);
            for (auto& rec : sol.levels[d]) {
                std::vector<double> c(b);
                for (std::size_t i = 0; i < b; ++i) {
                    const std::size_t child = rec.index * b + i;
                    c[i] = d + 1 == sol.levels.size() ? terminal_const(term, child)
                                                      : sol.at(k + 1, child).c;
                }
                const auto node = log_node_fixed(market.period(k), rec.worst_q, c);
                rec.c = node.c;
                rec.fraction = node.theta;
            }
        }
        double gamma = 0.0;
        for (std::size_t s = 0; s < K; ++s)
            gamma += weights[s] * set.scenarios[s].penalty;
        // The window penalty is charged once, at the root.
        auto& root = sol.levels[0][0];
        root.worst_penalty = gamma;
        for (auto& lvl : sol.levels)
            for (auto& rec : lvl)
                rec.c += gamma;
        sol.scenario_weights = weights;
        return sol;
    };

    std::vector<double> best;
    if (K == 2) {
        // The slope of the mixture objective in w is the gap between the two
        // scenario values of the best response; bisect on its sign.
        auto slope = [&](double w0) {
            const auto sol = evaluate({w0, 1.0 - w0});
            return scenario_value(market, sol, set.scenarios[0], term) -
                   scenario_value(market, sol, set.scenarios[1], term);
        };
        double lo = 0.0, hi = 1.0;
        if (slope(0.0) >= 0.0) {
            hi = 0.0;
        } else if (slope(1.0) <= 0.0) {
            lo = 1.0;
        } else {
            for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                const double mid = 0.5 * (lo + hi);
                (slope(mid) < 0.0 ? lo : hi) = mid;
            }
        }
        const double w0 = 0.5 * (lo + hi);
        best = {w0, 1.0 - w0};
    } else {
        best = simplex_minimize(K, [&](const std::vector<double>& wts) {
                   return evaluate(wts).levels[0][0].c;
               }).w;
    }
    TreeSolution sol = evaluate(best);
    forward_log(market, sol);
    return sol;
}

// ---------------------------------------------------------------------------
// Exact on-demand recursion for any utility.

struct GeneralNode {
    double value = -kInf;
    double amount = 0.0;
    std::vector<double> worst_q;
    std::vector<double> weights;
    double worst_penalty = 0.0;
};

class Recursion {
public:
    Recursion(const TreeMarket& m, const MeasureFamily& f, const Utility& u, const Window& w,
              const Terminal& t)
        : market_(m), family_(f), utility_(u), window_(w), term_(t)
    {
    }

    double value(std::size_t k, std::size_t node, double x) const
    {
        if (k == window_.T) {
            if (term_.general)
                return term_.general(node, x);
            const double u = utility_.value(x);
            return utility_.kind() == Utility::Kind::Log ? u + terminal_const(term_, node) : u;
        }
        return solve(k, node, x, false).value;
    }

    GeneralNode solve(std::size_t k, std::size_t node, double x, bool saddle) const
    {
        const auto& period = market_.period(k);
        const std::size_t b = period.returns.size();
        auto payoff = [&](double h) {
            std::vector<double> y(b);
            for (std::size_t i = 0; i < b; ++i)
                y[i] = value(k + 1, node * b + i, x + h * period.returns[i]);
            return y;
        };
        auto objective = [&](double h) { return aggregate(k, payoff(h)); };

        Argmin opt;
        if (utility_.needs_positive_wealth()) {
            if (!(x > 0.0))
                return {};
            auto [lo, hi] = feasible_amounts(x, period.returns);
            const double shrink = 1e-12 * (hi - lo);
            opt = golden_maximize(objective, lo + shrink, hi - shrink, kGoldenTol * std::max(1.0, x));
        } else {
            double rmin = kInf;
            for (double r : period.returns)
                rmin = std::min(rmin, std::abs(r));
            double B = (10.0 / utility_.parameter() + std::abs(x)) / rmin;
            for (int grow = 0; grow < 8; ++grow, B *= 10.0) {
                opt = golden_maximize(objective, -B, B, kGoldenTol * std::max(1.0, B * 1e-6));
                if (std::abs(opt.x) < B * (1.0 - 1e-6))
                    break;
            }
        }
        GeneralNode out;
        out.value = opt.f;
        out.amount = opt.x;
        if (saddle)
            select_saddle(k, payoff, opt, out);
        return out;
    }

private:
    double aggregate(std::size_t k, const std::vector<double>& y) const
    {
        for (double v : y)
            if (!std::isfinite(v))
                return -kInf;
        if (family_.kind() == MeasureFamily::Kind::Entropic) {
            const double delta = family_.entropic_delta();
            const auto& p = market_.period(k).p;
            const double ymin = *std::min_element(y.begin(), y.end());
            double s = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i)
                s += p[i] * std::exp(-(y[i] - ymin) / delta);
            return ymin - delta * std::log(s);
        }
        double best = kInf;
        for (const auto& ker : family_.kernels_at(k)) {
            double e = ker.penalty;
            for (std::size_t i = 0; i < y.size(); ++i)
                e += ker.q[i] * y[i];
            best = std::min(best, e);
        }
        return best;
    }

    template <typename Payoff>
    void select_saddle(std::size_t k, Payoff& payoff, const Argmin& opt, GeneralNode& out) const
    {
        const auto y = payoff(opt.x);
        if (family_.kind() == MeasureFamily::Kind::Entropic) {
            const double delta = family_.entropic_delta();
            const auto& p = market_.period(k).p;
            const double ymin = *std::min_element(y.begin(), y.end());
            std::vector<double> q(y.size());
            double z = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i)
                z += q[i] = p[i] * std::exp(-(y[i] - ymin) / delta);
            for (double& v : q)
                v /= z;
            out.worst_q = q;
            out.worst_penalty = delta * relative_entropy(q, p);
            return;
        }
        const auto& ks = family_.kernels_at(k);
        const double step = 1e-5 * std::max(1.0, std::abs(out.amount) + std::abs(opt.x));
        const auto yp = payoff(opt.x + step), ym = payoff(opt.x - step);
        std::vector<double> val(ks.size()), slope(ks.size());
        for (std::size_t j = 0; j < ks.size(); ++j) {
            double e = ks[j].penalty, ep = 0.0, em = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                e += ks[j].q[i] * y[i];
                ep += ks[j].q[i] * yp[i];
                em += ks[j].q[i] * ym[i];
            }
            val[j] = e;
            slope[j] = (ep - em) / (2.0 * step);
        }
        out.weights.assign(ks.size(), 0.0);
        std::vector<std::size_t> active;
        for (std::size_t j = 0; j < ks.size(); ++j)
            if (val[j] <= opt.f + 1e-7 * (1.0 + std::abs(opt.f)))
                active.push_back(j);
        std::size_t flat = active.front();
        for (std::size_t j : active)
            if (std::abs(slope[j]) < std::abs(slope[flat]))
                flat = j;
        bool mixed = false;
        if (std::abs(slope[flat]) > 1e-4)
            for (std::size_t a : active)
                for (std::size_t c : active)
                    if (!mixed && slope[a] > 0.0 && slope[c] < 0.0) {
                        const double wa = -slope[c] / (slope[a] - slope[c]);
                        out.weights[a] = wa;
                        out.weights[c] = 1.0 - wa;
                        mixed = true;
                    }
        if (!mixed)
            out.weights[flat] = 1.0;
        out.worst_q = mix_kernels(ks, out.weights, &out.worst_penalty);
    }

    const TreeMarket& market_;
    const MeasureFamily& family_;
    const Utility& utility_;
    Window window_;
    const Terminal& term_;
};

}  // namespace

const NodeRecord& TreeSolution::at(std::size_t period, std::size_t node) const
{
    if (period < window.t0 || period - window.t0 >= levels.size())
        throw std::out_of_range("tree solution: period outside the window");
    const auto& lvl = levels[period - window.t0];
    const std::size_t first = lvl.front().index;
    if (node < first || node - first >= lvl.size())
        throw std::out_of_range("tree solution: node outside the subtree");
    return lvl[node - first];
}

double TreeSolution::log_value(double x) const
{
    if (utility.kind() != Utility::Kind::Log)
        throw std::logic_error("log_value: solution is not for log utility");
    return std::log(x) + levels.at(0).at(0).c;
}

nlohmann::json TreeSolution::to_json() const
{
    auto rows = nlohmann::json::array();
    for (const auto& lvl : levels)
        for (const auto& r : lvl) {
            nlohmann::json row{{"period", r.period},     {"node", r.index},
                               {"wealth", r.wealth},     {"value", r.value},
                               {"amount", r.amount},     {"fraction", r.fraction},
                               {"worst_q", r.worst_q},   {"worst_penalty", r.worst_penalty}};
            if (utility.kind() == Utility::Kind::Log)
                row["c"] = r.c;
            if (!r.weights.empty())
                row["weights"] = r.weights;
            rows.push_back(std::move(row));
        }
    nlohmann::json j{{"t0", window.t0}, {"node", window.node}, {"T", window.T},
                     {"utility", utility.describe()}, {"x0", x0}, {"value", value}, {"nodes", rows}};
    if (!scenario_weights.empty())
        j["scenario_weights"] = scenario_weights;
    return j;
}

TreeSolution solve_primal(const TreeMarket& market, const MeasureFamily& family,
                          const Utility& utility, double x0, const Window& window,
                          const Terminal& terminal)
{
    check_window(market, window);
    family.validate(market);
    if (utility.needs_positive_wealth() && !(x0 > 0.0))
        throw std::invalid_argument("solve_primal: initial wealth must be positive");
    if (utility.kind() == Utility::Kind::Log && !terminal.general) {
        if (family.kind() == MeasureFamily::Kind::Scenarios)
            return solve_log_scenarios(market, family, x0, window, terminal);
        return solve_log_nodewise(market, family, x0, window, terminal);
    }
    if (family.kind() == MeasureFamily::Kind::Scenarios)
        throw std::invalid_argument("solve_primal: scenario families need log utility");
    if (window.T - window.t0 > 3)
        throw std::invalid_argument("solve_primal: the exact recursion is limited to 3 periods");

    Recursion rec(market, family, utility, window, terminal);
    TreeSolution sol;
    sol.window = window;
    sol.utility = utility;
    sol.x0 = x0;
    sol.levels = empty_levels(market, window);
    sol.levels[0][0].wealth = x0;
    for (std::size_t d = 0; d < sol.levels.size(); ++d) {
        const std::size_t k = window.t0 + d;
        const std::size_t b = market.branching(k);
        for (auto& r : sol.levels[d]) {
            const auto node = rec.solve(k, r.index, r.wealth, true);
            r.value = node.value;
            r.amount = node.amount;
            r.fraction = r.wealth != 0.0 ? node.amount / r.wealth : 0.0;
            r.worst_q = node.worst_q;
            r.weights = node.weights;
            r.worst_penalty = node.worst_penalty;
            if (utility.kind() == Utility::Kind::Log)
                r.c = r.value - std::log(r.wealth);
            if (d + 1 < sol.levels.size())
                for (std::size_t i = 0; i < b; ++i) {
                    auto& child = sol.levels[d + 1][r.index * b + i - sol.levels[d + 1].front().index];
                    child.wealth = r.wealth + r.amount * market.period(k).returns[i];
                }
        }
    }
    sol.value = sol.levels[0][0].value;
    return sol;
}

TreeSolution solve_primal(const TreeMarket& market, const MeasureFamily& family,
                          const Utility& utility, double x0)
{
    return solve_primal(market, family, utility, x0, Window{0, 0, market.n_periods()});
}

// ---------------------------------------------------------------------------
// Dual

std::vector<double> log_spaced(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw std::invalid_argument("log_spaced: need 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    const double a = std::log(lo), h = (std::log(hi) - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(a + static_cast<double>(i) * h);
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::pair<double, double> DualSolution::grid_conjugate(double x) const
{
    double best = kInf, arg = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i)
        if (const double v2 = v[i] + x * eta[i]; v2 < best) {
            best = v2;
            arg = eta[i];
        }
    return {best, arg};
}

std::pair<double, double> DualSolution::refined_conjugate(double x) const
{
    auto [best, arg] = grid_conjugate(x);
    const auto it = std::find(eta.begin(), eta.end(), arg);
    const std::size_t i = static_cast<std::size_t>(it - eta.begin());
    const double lo = std::log(eta[i == 0 ? 0 : i - 1]);
    const double hi = std::log(eta[i + 1 == eta.size() ? i : i + 1]);
    const auto m = golden_minimize(
        [&](double le) {
            const double e = std::exp(le);
            return value(e) + x * e;
        },
        lo, hi, 1e-12);
    if (m.f < best)
        return {m.f, std::exp(m.x)};
    return {best, arg};
}

namespace {

// lim q V(c / q) handled at the boundary of the simplex.
double perspective(const Utility& u, double q, double c)
{
    if (q <= 0.0) {
        if (u.kind() == Utility::Kind::Exp)
            return c > 0.0 ? kInf : 0.0;
        return 0.0;
    }
    const double y = c / q;
    if (y <= 0.0) {
        if (u.kind() == Utility::Kind::Log)
            return kInf;
        if (u.kind() == Utility::Kind::Power)
            return u.parameter() > 1.0 ? 0.0 : kInf;
        return 0.0;
    }
    return q * u.conjugate(y);
}

}  // namespace

DualSolution solve_dual(const TreeMarket& market, const MeasureFamily& family, const Utility& utility,
                        const DualOptions& options, const Terminal& terminal)
{
    family.validate(market);
    if (family.kind() == MeasureFamily::Kind::Scenarios)
        throw std::invalid_argument("solve_dual: scenario families are not supported");
    if (terminal.general)
        throw std::invalid_argument("solve_dual: general terminal criteria are not supported");
    DualSolution out;
    out.eta = log_spaced(options.eta_min, options.eta_max, options.eta_points);

    if (utility.kind() == Utility::Kind::Log) {
        const std::size_t T = market.n_periods();
        std::vector<double> next(market.nodes(T));
        for (std::size_t j = 0; j < next.size(); ++j)
            next[j] = terminal_const(terminal, j);
        std::map<std::pair<std::size_t, std::vector<double>>, DualNode> memo;
        std::vector<DualMinimizer> mins;
        for (std::size_t k = T; k-- > 0;) {
            const std::size_t b = market.branching(k);
            std::vector<double> cur(market.nodes(k));
            for (std::size_t j = 0; j < cur.size(); ++j) {
                std::vector<double> D(next.begin() + static_cast<std::ptrdiff_t>(j * b),
                                      next.begin() + static_cast<std::ptrdiff_t>((j + 1) * b));
                auto key = std::make_pair(k, D);
                auto it = memo.find(key);
                if (it == memo.end()) {
                    DualNode node =
                        family.kind() == MeasureFamily::Kind::Entropic
                            ? log_dual_entropic(market.period(k), family.entropic_delta(), D, options.sweep)
                            : log_dual_kernels(market.period(k), family.kernels_at(k), D, options.sweep);
                    it = memo.emplace(std::move(key), std::move(node)).first;
                }
                cur[j] = it->second.D;
                mins.push_back({k, j, it->second.q, it->second.m, it->second.weights, it->second.s});
            }
            next = std::move(cur);
        }
        const double D = next.front();
        std::reverse(mins.begin(), mins.end());
        std::stable_sort(mins.begin(), mins.end(), [](const DualMinimizer& a, const DualMinimizer& b) {
            return a.period < b.period || (a.period == b.period && a.index < b.index);
        });
        out.minimizers = std::move(mins);
        out.D = D;
        out.value = [D](double eta) { return -std::log(eta) - 1.0 + D; };
    } else {
        if (market.n_periods() != 1)
            throw std::invalid_argument("solve_dual: non-log utilities are limited to one period");
        const Period period = market.period(0);
        const EmmSet emm(period.returns);
        const MeasureFamily fam = family;
        const Utility u = utility;
        out.value = [period, emm, fam, u](double eta) {
            auto over_q = [&](const std::vector<double>& m) {
                if (fam.kind() == MeasureFamily::Kind::Entropic) {
                    const double delta = fam.entropic_delta();
                    return simplex_minimize(period.p.size(), [&](const std::vector<double>& q) {
                               double s = 0.0;
                               for (std::size_t i = 0; i < q.size(); ++i) {
                                   s += perspective(u, q[i], eta * m[i]);
                                   if (q[i] > 0.0)
                                       s += delta * q[i] * std::log(q[i] / period.p[i]);
                               }
                               return s;
                           })
                        .f;
                }
                const auto& ks = fam.kernels_at(0);
                return simplex_minimize(ks.size(), [&](const std::vector<double>& w) {
                           double g = 0.0;
                           const auto q = mix_kernels(ks, w, &g);
                           for (std::size_t i = 0; i < q.size(); ++i)
                               g += perspective(u, q[i], eta * m[i]);
                           return g;
                       })
                    .f;
            };
            if (emm.unique())
                return over_q(emm.at(0.0));
            return golden_minimize([&](double s) { return over_q(emm.at(s)); }, 0.0, 1.0, 1e-10).f;
        };
    }
    out.v.resize(out.eta.size());
    parallel_for(out.eta.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            out.v[i] = out.value(out.eta[i]);
    });
    return out;
}

void write_dual_csv(std::ostream& out, const DualSolution& dual)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "eta,v\n";
    for (std::size_t i = 0; i < dual.eta.size(); ++i)
        out << dual.eta[i] << ',' << dual.v[i] << '\n';
    out.precision(old);
}

}  // namespace rfc::oracle
