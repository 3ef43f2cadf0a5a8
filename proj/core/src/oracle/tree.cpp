#include "rfc/oracle/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rfc::oracle {

TreeMarket::TreeMarket(std::vector<Period> periods) : periods_(std::move(periods))
{
    if (periods_.empty())
        throw std::invalid_argument("tree: need at least one period");
    if (periods_.size() > 12)
        throw std::invalid_argument("tree: at most 12 periods are supported");
    for (std::size_t k = 0; k < periods_.size(); ++k) {
        const auto& pr = periods_[k];
        const std::string where = "tree period " + std::to_string(k) + ": ";
        if (pr.returns.size() < 2 || pr.p.size() != pr.returns.size())
            throw std::invalid_argument(where + "need >= 2 branches with one probability each");
        double sum = 0.0;
        for (double q : pr.p) {
            if (!(q > 0.0 && q < 1.0))
                throw std::invalid_argument(where + "probabilities must lie in (0, 1)");
            sum += q;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument(where + "probabilities must sum to 1");
        for (double r : pr.returns)
            if (!(r > -1.0) || !std::isfinite(r))
                throw std::invalid_argument(where + "returns must be finite and > -1");
        const auto [lo, hi] = std::minmax_element(pr.returns.begin(), pr.returns.end());
        if (!(*lo < 0.0 && *hi > 0.0))
            throw std::invalid_argument(where + "arbitrage: need min return < 0 < max return");
    }
}

std::size_t TreeMarket::nodes(std::size_t k) const
{
    std::size_t n = 1;
    for (std::size_t j = 0; j < k; ++j)
        n *= branching(j);
    return n;
}

std::pair<std::size_t, std::size_t> TreeMarket::descendants(std::size_t from, std::size_t node,
                                                            std::size_t to) const
{
    std::size_t first = node, last = node + 1;
    for (std::size_t k = from; k < to; ++k) {
        first *= branching(k);
        last *= branching(k);
    }
    return {first, last};
}

std::size_t TreeMarket::branch_at(std::size_t k, std::size_t leaf, std::size_t to) const
{
    std::size_t idx = leaf;
    for (std::size_t j = to; j > k + 1; --j)
        idx /= branching(j - 1);
    return idx % branching(k);
}

nlohmann::json TreeMarket::describe() const
{
    auto arr = nlohmann::json::array();
    for (const auto& p : periods_)
        arr.push_back({{"returns", p.returns}, {"p", p.p}});
    return {{"periods", arr}};
}

Utility Utility::log() { return Utility{}; }

Utility Utility::power(double R)
{
    if (!(R > 0.0) || R == 1.0 || !std::isfinite(R))
        throw std::invalid_argument("power utility: need R > 0 and R != 1");
    Utility u;
    u.kind_ = Kind::Power;
    u.param_ = R;
    return u;
}

Utility Utility::exponential(double alpha)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("exponential utility: need alpha > 0");
    Utility u;
    u.kind_ = Kind::Exp;
    u.param_ = alpha;
    return u;
}

double Utility::value(double x) const
{
    switch (kind_) {
    case Kind::Log:
        return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
    case Kind::Power:
        if (x > 0.0)
            return std::pow(x, 1.0 - param_) / (1.0 - param_);
        return param_ < 1.0 && x == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    case Kind::Exp:
        break;
    }
    return -std::exp(-param_ * x) / param_;
}

double Utility::conjugate(double y) const
{
    if (!(y > 0.0))
        throw std::invalid_argument("conjugate: y must be positive");
    switch (kind_) {
    case Kind::Log:
        return -std::log(y) - 1.0;
    case Kind::Power:
        return param_ / (1.0 - param_) * std::pow(y, 1.0 - 1.0 / param_);
    case Kind::Exp:
        break;
    }
    return y / param_ * (std::log(y) - 1.0);
}

std::string Utility::name() const
{
    switch (kind_) {
    case Kind::Log:
        return "log";
    case Kind::Power:
        return "power";
    case Kind::Exp:
        break;
    }
    return "exp";
}

nlohmann::json Utility::describe() const
{
    switch (kind_) {
    case Kind::Log:
        return {{"type", "log"}};
    case Kind::Power:
        return {{"type", "power"}, {"R", param_}};
    case Kind::Exp:
        break;
    }
    return {{"type", "exp"}, {"alpha", param_}};
}

std::pair<double, double> feasible_amounts(double x, const std::vector<double>& returns)
{
    const auto [lo, hi] = std::minmax_element(returns.begin(), returns.end());
    return {-x / *hi, -x / *lo};
}

}  // namespace rfc::oracle
