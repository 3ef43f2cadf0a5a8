#include "rfc/oracle/family.hpp"

#include <cmath>
#include <stdexcept>

namespace rfc::oracle {

MeasureFamily MeasureFamily::kernels(std::vector<std::vector<Kernel>> per_period)
{
    for (const auto& ks : per_period)
        if (ks.empty())
            throw std::invalid_argument("measure family: empty kernel set");
    MeasureFamily f;
    f.repr_ = Kernels{std::move(per_period)};
    return f;
}

MeasureFamily MeasureFamily::reference(const TreeMarket& market)
{
    std::vector<std::vector<Kernel>> per;
    for (std::size_t k = 0; k < market.n_periods(); ++k)
        per.push_back({Kernel{market.period(k).p, 0.0, "p"}});
    return kernels(std::move(per));
}

MeasureFamily MeasureFamily::entropic(double delta)
{
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("entropic family: delta must be positive");
    MeasureFamily f;
    f.repr_ = Entropic{delta};
    return f;
}

MeasureFamily MeasureFamily::scenarios(std::vector<ScenarioSet> sets)
{
    if (sets.empty())
        throw std::invalid_argument("measure family: empty scenario table");
    for (const auto& s : sets)
        if (s.scenarios.empty())
            throw std::invalid_argument("measure family: empty scenario set");
    MeasureFamily f;
    f.repr_ = Scenarios{std::move(sets)};
    return f;
}

const std::vector<Kernel>& MeasureFamily::kernels_at(std::size_t period) const
{
    const auto& k = std::get<Kernels>(repr_).per_period;
    if (period >= k.size())
        throw std::invalid_argument("measure family: no kernels for period " + std::to_string(period));
    return k[period];
}

double MeasureFamily::entropic_delta() const { return std::get<Entropic>(repr_).delta; }

const ScenarioSet& MeasureFamily::scenarios_for(std::size_t t, std::size_t T) const
{
    for (const auto& s : std::get<Scenarios>(repr_).sets)
        if (s.t == t && s.T == T)
            return s;
    throw std::invalid_argument("measure family: no scenarios for window (" + std::to_string(t) +
                                ", " + std::to_string(T) + ")");
}

const std::vector<ScenarioSet>& MeasureFamily::scenario_sets() const
{
    return std::get<Scenarios>(repr_).sets;
}

namespace {

void check_kernel(const std::vector<double>& q, std::size_t branches, const std::string& where)
{
    if (q.size() != branches)
        throw std::invalid_argument(where + ": kernel length differs from the branching");
    double s = 0.0;
    for (double v : q) {
        if (!(v > 0.0 && v < 1.0))
            throw std::invalid_argument(where + ": kernel entries must lie in (0, 1)");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument(where + ": kernel must sum to 1");
}

}  // namespace

void MeasureFamily::validate(const TreeMarket& market) const
{
    if (const auto* k = std::get_if<Kernels>(&repr_)) {
        if (k->per_period.size() != market.n_periods())
            throw std::invalid_argument("measure family: need one kernel set per period");
        for (std::size_t t = 0; t < market.n_periods(); ++t)
            for (std::size_t j = 0; j < k->per_period[t].size(); ++j) {
                const auto& ker = k->per_period[t][j];
                check_kernel(ker.q, market.branching(t),
                             "kernel " + std::to_string(j) + " of period " + std::to_string(t));
                if (!std::isfinite(ker.penalty))
                    throw std::invalid_argument("kernel penalty must be finite");
            }
        return;
    }
    if (const auto* s = std::get_if<Scenarios>(&repr_)) {
        for (const auto& set : s->sets) {
            if (!(set.t < set.T) || set.T > market.n_periods())
                throw std::invalid_argument("scenario window must satisfy t < T <= n_periods");
            for (const auto& sc : set.scenarios) {
                if (sc.kernels.size() != set.T - set.t)
                    throw std::invalid_argument("scenario " + sc.label +
                                                ": need one kernel per period of its window");
                for (std::size_t j = 0; j < sc.kernels.size(); ++j)
                    check_kernel(sc.kernels[j], market.branching(set.t + j), "scenario " + sc.label);
                if (!std::isfinite(sc.penalty))
                    throw std::invalid_argument("scenario penalty must be finite");
            }
        }
    }
}

nlohmann::json MeasureFamily::describe() const
{
    if (const auto* k = std::get_if<Kernels>(&repr_)) {
        auto per = nlohmann::json::array();
        for (const auto& ks : k->per_period) {
            auto arr = nlohmann::json::array();
            for (const auto& ker : ks)
                arr.push_back({{"q", ker.q}, {"penalty", ker.penalty}, {"label", ker.label}});
            per.push_back(arr);
        }
        return {{"type", "kernels"}, {"periods", per}};
    }
    if (const auto* e = std::get_if<Entropic>(&repr_))
        return {{"type", "entropic"}, {"delta", e->delta}};
    auto sets = nlohmann::json::array();
    for (const auto& set : std::get<Scenarios>(repr_).sets) {
        auto sc = nlohmann::json::array();
        for (const auto& s : set.scenarios)
            sc.push_back({{"kernels", s.kernels}, {"penalty", s.penalty}, {"label", s.label}});
        sets.push_back({{"t", set.t}, {"T", set.T}, {"scenarios", sc}});
    }
    return {{"type", "scenarios"}, {"sets", sets}};
}

double degenerate_up_probability(double lambda)
{
    return 0.5 * (1.0 + lambda / std::sqrt(1.0 + lambda * lambda));
}

double symmetric_log_growth(double q)
{
    return q * std::log(2.0 * q) + (1.0 - q) * std::log(2.0 * (1.0 - q));
}

MeasureFamily degenerate_family(const TreeMarket& market, const std::vector<LambdaWindow>& table)
{
    for (std::size_t k = 0; k < market.n_periods(); ++k) {
        const auto& r = market.period(k).returns;
        if (r.size() != 2 || r[0] != -r[1])
            throw std::invalid_argument("degenerate family: period " + std::to_string(k) +
                                        " must have symmetric returns (+a, -a)");
    }
    std::vector<ScenarioSet> sets;
    for (const auto& w : table) {
        if (!(w.t < w.T) || w.T > market.n_periods())
            throw std::invalid_argument("degenerate family: window must satisfy t < T <= n_periods");
        const double q = degenerate_up_probability(w.lambda);
        ScenarioSet set{w.t, w.T, {}};
        Scenario s;
        for (std::size_t k = w.t; k < w.T; ++k) {
            // Kernel order follows the market's branch order.
            const bool up_first = market.period(k).returns[0] > 0.0;
            s.kernels.push_back(up_first ? std::vector<double>{q, 1.0 - q}
                                         : std::vector<double>{1.0 - q, q});
        }
        s.penalty = -static_cast<double>(w.T - w.t) * symmetric_log_growth(q);
        s.label = "lambda=" + std::to_string(w.lambda);
        set.scenarios.push_back(std::move(s));
        sets.push_back(std::move(set));
    }
    return MeasureFamily::scenarios(std::move(sets));
}

}  // namespace rfc::oracle
