#include <cmath>

#include "experiments.hpp"
#include "rfc/rng.hpp"

namespace rfc::app {

namespace {

constexpr std::uint32_t kCoefficientStreams = 0x20000000u;

}  // namespace

CoefficientConfig coefficient_from(ObjectReader& r, const std::string& key, std::uint32_t stream)
{
    CoefficientConfig c;
    c.stream = stream;
    const auto& v = r.raw(key);
    const std::string path = r.child(key);
    if (v.is_number()) {
        c.a = json_number(v, path);
        return c;
    }
    ObjectReader o(v, path);
    c.type = o.string("type");
    if (c.type == "constant") {
        c.a = o.number("value");
    } else if (c.type == "linear") {
        c.a = o.number("a");
        c.b = o.number("b");
    } else if (c.type == "table") {
        c.values = o.numbers("values");
        if (c.values.empty())
            throw SchemaError(o.child("values"), "must not be empty");
    } else if (c.type == "random") {
        c.a = o.number("mean");
        c.spread = o.number("spread");
        if (c.spread < 0.0)
            throw SchemaError(o.child("spread"), "must be >= 0");
    } else {
        throw SchemaError(o.child("type"), "unknown coefficient type \"" + c.type + "\"");
    }
    o.finish();
    return c;
}

CoefficientConfig coefficient_from(ObjectReader& r, const std::string& key, std::uint32_t stream,
                                   double fallback)
{
    if (r.has(key))
        return coefficient_from(r, key, stream);
    r.number(key, fallback);
    CoefficientConfig c;
    c.a = fallback;
    c.stream = stream;
    return c;
}

CoefficientPath CoefficientConfig::path(const TimeGrid& grid, std::uint64_t seed) const
{
    if (type == "constant")
        return CoefficientPath::constant(a);
    if (type == "linear") {
        const double a0 = a, b0 = b;
        return CoefficientPath::function([a0, b0](double t) { return a0 + b0 * t; },
                                         "linear(" + std::to_string(a0) + "," + std::to_string(b0) + ")");
    }
    if (type == "table")
        return CoefficientPath::tabulated(values);
    std::vector<double> table(grid.n_steps());
    const Substream s{seed, kCoefficientStreams | stream, 0};
    for (std::size_t k = 0; k < table.size(); k += 2) {
        const auto z = normal_pair(s, static_cast<std::uint32_t>(k / 2));
        for (std::size_t i = 0; i < 2 && k + i < table.size(); ++i)
            table[k + i] = a * std::exp(spread * z[i] - 0.5 * spread * spread);
    }
    return CoefficientPath::tabulated(std::move(table));
}

std::function<double(double)> CoefficientConfig::continuous(const std::string& where) const
{
    if (type == "constant") {
        const double v = a;
        return [v](double) { return v; };
    }
    if (type == "linear") {
        const double a0 = a, b0 = b;
        return [a0, b0](double t) { return a0 + b0 * t; };
    }
    throw SchemaError(where, "needs a constant or linear coefficient");
}

MarketConfig market_from(ObjectReader& root, const Context& ctx)
{
    auto m = root.object("market");
    MarketConfig out;
    const double horizon = m.positive("horizon", 1.0);
    const std::size_t steps = m.count("steps", 252);
    if (steps == 0)
        throw SchemaError(m.child("steps"), "must be positive");
    out.grid = TimeGrid(horizon, steps);
    const auto sigma = coefficient_from(m, "sigma", 1);
    const auto lambda = coefficient_from(m, "lambda_hat", 2);
    const auto delta = coefficient_from(m, "delta", 3);
    out.S0 = m.positive("S0", 1.0);
    m.finish();
    try {
        out.coeffs.sigma = sigma.path(out.grid, ctx.seed);
        out.coeffs.lambda_hat = lambda.path(out.grid, ctx.seed);
        out.coeffs.delta = delta.path(out.grid, ctx.seed);
        (void)realize(out.coeffs, out.grid);
    } catch (const SchemaError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(m.path(), e.what());
    }
    return out;
}

}  // namespace rfc::app
