#pragma once

#include <array>
#include <functional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "rfc/coefficients.hpp"
#include "rfc/step_state.hpp"

namespace rfc {

/// Specification of a density generator eta = (eta1, eta2), evaluated step
/// by step from information available at t_k. Realized along a scenario by
/// rfc::doleans.
class GeneratorSpec {
public:
    using Feedback = std::function<std::array<double, 2>(const MarketState&)>;

    static GeneratorSpec zero();
    static GeneratorSpec constant(double eta1, double eta2);
    static GeneratorSpec paths(CoefficientPath eta1, CoefficientPath eta2);
    /// eta_k = (-lambda_hat_k / (1 + delta_k), 0), read from the market state.
    static GeneratorSpec worst_case();
    /// Markov feedback in the asset level; must be bounded.
    static GeneratorSpec feedback(Feedback f, std::string label);

    /// c * eta.
    GeneratorSpec scaled(double c) const;

    std::array<double, 2> at(const MarketState& state, const TimeGrid& grid) const;

    /// True when eta does not depend on the scenario.
    bool is_deterministic() const noexcept;
    bool is_zero() const noexcept;
    bool is_worst_case() const noexcept;
    double scale() const noexcept { return scale_; }

    nlohmann::json describe() const;

private:
    struct Zero {};
    struct Paths {
        CoefficientPath eta1, eta2;
    };
    struct WorstCase {};
    struct Labeled {
        Feedback f;
        std::string label;
    };
    std::variant<Zero, Paths, WorstCase, Labeled> repr_{Zero{}};
    double scale_ = 1.0;
};

}  // namespace rfc
