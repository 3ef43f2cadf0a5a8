#include "rfc/oracle/inconsistency.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rfc::oracle {

nlohmann::json InconsistencyReport::to_json() const
{
    auto w = nlohmann::json::array();
    for (const auto& r : windows)
        w.push_back({{"t", r.t}, {"T", r.T}, {"lambda", r.lambda}, {"pi", r.pi},
                     {"penalty", r.penalty}, {"residual", r.residual}});
    return {{"sigma", sigma},
            {"windows", w},
            {"max_residual", max_residual},
            {"strategy_inconsistent", strategy_inconsistent},
            {"horizon_inconsistent", horizon_inconsistent}};
}

InconsistencyReport inconsistency_demo_continuous(const std::vector<LambdaEntry>& table, double sigma,
                                                  const TimeGrid& grid)
{
    if (!(sigma > 0.0))
        throw std::invalid_argument("inconsistency demo: sigma must be positive");
    if (table.empty())
        throw std::invalid_argument("inconsistency demo: empty lambda table");
    const auto spec = PenaltySpec::degenerate(table);
    InconsistencyReport rep;
    rep.sigma = sigma;
    for (const auto& e : table) {
        if (!(e.t < e.T) || e.T > grid.horizon() + 1e-12)
            throw std::invalid_argument("inconsistency demo: window outside the time grid");
        WindowIdentity w;
        w.t = e.t;
        w.T = e.T;
        w.lambda = spec.lambda_for(e.t, e.T);
        w.pi = w.lambda / sigma;
        const double excess = 0.5 * (e.T - e.t) * w.lambda * w.lambda;
        w.penalty = -excess;
        w.residual = excess + w.penalty;
        rep.max_residual = std::max(rep.max_residual, std::abs(w.residual));
        rep.windows.push_back(w);
        for (std::size_t k = 0; k <= grid.n_steps(); ++k) {
            const double u = grid.time(k);
            if (u >= e.t - 1e-12 && u < e.T - 1e-12)
                rep.strategies.push_back({e.t, e.T, u, w.pi});
        }
    }
    for (const auto& a : rep.windows)
        for (const auto& b : rep.windows) {
            if (a.T == b.T && a.t < b.t && a.pi != b.pi)
                rep.strategy_inconsistent = true;
            if (a.t == b.t && a.T < b.T && a.pi != b.pi)
                rep.horizon_inconsistent = true;
        }
    return rep;
}

void write_strategy_csv(std::ostream& out, const InconsistencyReport& report)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "t,T,u,pi\n";
    for (const auto& r : report.strategies)
        out << r.t << ',' << r.T << ',' << r.u << ',' << r.pi << '\n';
    out.precision(old);
}

}  // namespace rfc::oracle
