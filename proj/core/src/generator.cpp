#include "rfc/generator.hpp"

#include <cmath>
#include <stdexcept>

namespace rfc {

GeneratorSpec GeneratorSpec::zero() { return GeneratorSpec{}; }

GeneratorSpec GeneratorSpec::constant(double eta1, double eta2)
{
    return paths(CoefficientPath(eta1), CoefficientPath(eta2));
}

GeneratorSpec GeneratorSpec::paths(CoefficientPath eta1, CoefficientPath eta2)
{
    GeneratorSpec g;
    g.repr_ = Paths{std::move(eta1), std::move(eta2)};
    return g;
}

GeneratorSpec GeneratorSpec::worst_case()
{
    GeneratorSpec g;
    g.repr_ = WorstCase{};
    return g;
}

GeneratorSpec GeneratorSpec::feedback(Feedback f, std::string label)
{
    if (!f)
        throw std::invalid_argument("GeneratorSpec::feedback: empty function");
    GeneratorSpec g;
    g.repr_ = Labeled{std::move(f), std::move(label)};
    return g;
}

GeneratorSpec GeneratorSpec::scaled(double c) const
{
    if (!std::isfinite(c))
        throw std::invalid_argument("GeneratorSpec::scaled: non-finite factor");
    GeneratorSpec g = *this;
    g.scale_ *= c;
    return g;
}

std::array<double, 2> GeneratorSpec::at(const MarketState& state, const TimeGrid& grid) const
{
    std::array<double, 2> eta{0.0, 0.0};
    if (const auto* p = std::get_if<Paths>(&repr_)) {
        eta = {p->eta1.at(grid, state.k), p->eta2.at(grid, state.k)};
    } else if (std::holds_alternative<WorstCase>(repr_)) {
        eta = {-state.lambda_hat / (1.0 + state.delta), 0.0};
    } else if (const auto* l = std::get_if<Labeled>(&repr_)) {
        eta = l->f(state);
    }
    eta[0] *= scale_;
    eta[1] *= scale_;
    if (!std::isfinite(eta[0]) || !std::isfinite(eta[1]))
        throw std::invalid_argument("density generator produced a non-finite value at step " +
                                    std::to_string(state.k));
    return eta;
}

bool GeneratorSpec::is_deterministic() const noexcept
{
    return !std::holds_alternative<Labeled>(repr_);
}

bool GeneratorSpec::is_zero() const noexcept
{
    if (scale_ == 0.0 || std::holds_alternative<Zero>(repr_))
        return true;
    if (const auto* p = std::get_if<Paths>(&repr_))
        return p->eta1.is_constant() && p->eta2.is_constant() &&
               p->eta1.constant_value() == 0.0 && p->eta2.constant_value() == 0.0;
    return false;
}

bool GeneratorSpec::is_worst_case() const noexcept
{
    return std::holds_alternative<WorstCase>(repr_) && scale_ == 1.0;
}

nlohmann::json GeneratorSpec::describe() const
{
    nlohmann::json j;
    if (std::holds_alternative<Zero>(repr_))
        j = {{"type", "zero"}};
    else if (const auto* p = std::get_if<Paths>(&repr_))
        j = {{"type", "paths"}, {"eta1", p->eta1.describe()}, {"eta2", p->eta2.describe()}};
    else if (std::holds_alternative<WorstCase>(repr_))
        j = {{"type", "worst_case"}};
    else
        j = {{"type", "feedback"}, {"label", std::get<Labeled>(repr_).label}};
    j["scale"] = scale_;
    return j;
}

}  // namespace rfc
