#include "rfc/coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace rfc {

CoefficientPath CoefficientPath::function(Function f, std::string label)
{
    if (!f)
        throw std::invalid_argument("CoefficientPath: empty function");
    CoefficientPath p;
    p.repr_ = Labeled{std::move(f), std::move(label)};
    return p;
}

CoefficientPath CoefficientPath::tabulated(std::vector<double> per_step)
{
    CoefficientPath p;
    p.repr_ = std::move(per_step);
    return p;
}

std::vector<double> CoefficientPath::realize(const TimeGrid& grid) const
{
    const std::size_t n = grid.n_steps();
    std::vector<double> out;
    if (const auto* c = std::get_if<double>(&repr_)) {
        out.assign(n, *c);
    } else if (const auto* lf = std::get_if<Labeled>(&repr_)) {
        out.resize(n);
        for (std::size_t k = 0; k < n; ++k)
            out[k] = lf->f(grid.time(k));
    } else {
        const auto& table = std::get<std::vector<double>>(repr_);
        if (table.size() != n)
            throw std::invalid_argument("CoefficientPath: table has " +
                                        std::to_string(table.size()) + " entries, grid has " +
                                        std::to_string(n) + " steps");
        out = table;
    }
    for (double v : out)
        if (!std::isfinite(v))
            throw std::invalid_argument("CoefficientPath: non-finite coefficient value");
    return out;
}

double CoefficientPath::at(const TimeGrid& grid, std::size_t k) const
{
    if (k >= grid.n_steps())
        throw std::out_of_range("CoefficientPath::at: step index past last step");
    double v;
    if (const auto* c = std::get_if<double>(&repr_)) {
        v = *c;
    } else if (const auto* lf = std::get_if<Labeled>(&repr_)) {
        v = lf->f(grid.time(k));
    } else {
        const auto& table = std::get<std::vector<double>>(repr_);
        if (table.size() != grid.n_steps())
            throw std::invalid_argument("CoefficientPath: table length does not match grid");
        v = table[k];
    }
    if (!std::isfinite(v))
        throw std::invalid_argument("CoefficientPath: non-finite coefficient value");
    return v;
}

nlohmann::json CoefficientPath::describe() const
{
    if (const auto* c = std::get_if<double>(&repr_))
        return *c;
    if (const auto* lf = std::get_if<Labeled>(&repr_))
        return {{"function", lf->label}};
    return {{"table", std::get<std::vector<double>>(repr_)}};
}

nlohmann::json MarketCoefficients::describe() const
{
    return {{"sigma", sigma.describe()},
            {"lambda_hat", lambda_hat.describe()},
            {"delta", delta.describe()}};
}

CoefficientTable realize(const MarketCoefficients& coeffs, const TimeGrid& grid)
{
    CoefficientTable t{grid, coeffs.sigma.realize(grid), coeffs.lambda_hat.realize(grid),
                       coeffs.delta.realize(grid)};
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t.sigma[k] == 0.0)
            throw std::invalid_argument("MarketCoefficients: sigma is zero at step " +
                                        std::to_string(k));
        if (t.delta[k] < 0.0)
            throw std::invalid_argument("MarketCoefficients: delta is negative at step " +
                                        std::to_string(k));
    }
    return t;
}

}  // namespace rfc
