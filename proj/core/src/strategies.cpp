#include "rfc/strategies.hpp"

#include <cmath>
#include <stdexcept>

namespace rfc {

Strategy Strategy::fractional_kelly() { return Strategy{}; }

Strategy Strategy::constant_fraction(double c)
{
    if (!std::isfinite(c))
        throw std::invalid_argument("Strategy: non-finite constant fraction");
    Strategy s;
    s.repr_ = Constant{c};
    return s;
}

Strategy Strategy::tabulated(std::vector<double> per_step)
{
    Strategy s;
    s.repr_ = Tabulated{std::move(per_step)};
    return s;
}

Strategy Strategy::scaled(Strategy base, double rho)
{
    if (!std::isfinite(rho))
        throw std::invalid_argument("Strategy: non-finite scale factor");
    Strategy s;
    s.repr_ = Scaled{std::make_shared<const Strategy>(std::move(base)), rho};
    return s;
}

double kelly_fraction(double sigma, double lambda_hat, double delta)
{
    if (sigma == 0.0)
        throw std::invalid_argument("fractional Kelly: sigma is zero");
    return delta / (1.0 + delta) * lambda_hat / sigma;
}

double Strategy::fraction(const StepState& state) const
{
    double pi = 0.0;
    if (std::holds_alternative<FractionalKelly>(repr_)) {
        pi = kelly_fraction(state.sigma, state.lambda_hat, state.delta);
    } else if (const auto* c = std::get_if<Constant>(&repr_)) {
        pi = c->c;
    } else if (const auto* t = std::get_if<Tabulated>(&repr_)) {
        if (state.k >= t->table.size())
            throw std::invalid_argument("Strategy: tabulated fractions shorter than the grid");
        pi = t->table[state.k];
    } else {
        const auto& s = std::get<Scaled>(repr_);
        pi = s.rho * s.base->fraction(state);
    }
    if (!std::isfinite(pi))
        throw std::invalid_argument("Strategy " + id() + " produced a non-finite fraction at step " +
                                    std::to_string(state.k));
    return pi;
}

std::string Strategy::id() const
{
    if (std::holds_alternative<FractionalKelly>(repr_))
        return "fractional_kelly";
    if (const auto* c = std::get_if<Constant>(&repr_))
        return "constant(" + std::to_string(c->c) + ")";
    if (std::holds_alternative<Tabulated>(repr_))
        return "tabulated";
    const auto& s = std::get<Scaled>(repr_);
    return "scaled(" + s.base->id() + ", " + std::to_string(s.rho) + ")";
}

nlohmann::json Strategy::describe() const
{
    if (std::holds_alternative<FractionalKelly>(repr_))
        return {{"type", "fractional_kelly"}};
    if (const auto* c = std::get_if<Constant>(&repr_))
        return {{"type", "constant"}, {"fraction", c->c}};
    if (const auto* t = std::get_if<Tabulated>(&repr_))
        return {{"type", "tabulated"}, {"fractions", t->table}};
    const auto& s = std::get<Scaled>(repr_);
    return {{"type", "scaled"}, {"factor", s.rho}, {"base", s.base->describe()}};
}

Strategy Strategy::from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw std::invalid_argument("strategy: expected an object with a string \"type\"");
    const auto type = j.at("type").get<std::string>();
    auto reject_extra = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [key, _] : j.items()) {
            bool ok = key == "type";
            for (const char* a : allowed)
                ok = ok || key == a;
            if (!ok)
                throw std::invalid_argument("strategy." + key + ": unknown key");
        }
    };
    if (type == "fractional_kelly") {
        reject_extra({});
        return fractional_kelly();
    }
    if (type == "constant") {
        reject_extra({"fraction"});
        return constant_fraction(j.at("fraction").get<double>());
    }
    if (type == "tabulated") {
        reject_extra({"fractions"});
        return tabulated(j.at("fractions").get<std::vector<double>>());
    }
    if (type == "scaled") {
        reject_extra({"factor", "base"});
        return scaled(from_json(j.at("base")), j.at("factor").get<double>());
    }
    throw std::invalid_argument("strategy.type: unknown strategy type \"" + type + "\"");
}

Strategy fractional_kelly(const MarketCoefficients& coeffs)
{
    if (coeffs.sigma.is_constant() && coeffs.sigma.constant_value() == 0.0)
        throw std::invalid_argument("fractional_kelly: sigma is zero");
    return Strategy::fractional_kelly();
}

GeneratorSpec worst_case_generator(const MarketCoefficients& coeffs)
{
    if (coeffs.delta.is_constant() && coeffs.delta.constant_value() < 0.0)
        throw std::invalid_argument("worst_case_generator: delta must be non-negative");
    return GeneratorSpec::worst_case();
}

}  // namespace rfc
