#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfc/coefficients.hpp"
#include "rfc/generator.hpp"
#include "rfc/step_state.hpp"

namespace rfc {

/// An adapted investment policy, expressed as the fraction of current wealth
/// held in the risky asset. Evaluation only sees the state at t_k.
class Strategy {
public:
    /// pi_k = delta_k / (1 + delta_k) * lambda_hat_k / sigma_k.
    static Strategy fractional_kelly();
    static Strategy constant_fraction(double c);
    static Strategy tabulated(std::vector<double> per_step);
    static Strategy scaled(Strategy base, double rho);

    /// Throws std::invalid_argument on a non-finite fraction.
    double fraction(const StepState& state) const;

    std::string id() const;
    nlohmann::json describe() const;

    /// {"type": "fractional_kelly"} | {"type": "constant", "fraction": c} |
    /// {"type": "tabulated", "fractions": [...]} |
    /// {"type": "scaled", "factor": rho, "base": {...}}
    static Strategy from_json(const nlohmann::json& j);

private:
    struct FractionalKelly {};
    struct Constant {
        double c;
    };
    struct Tabulated {
        std::vector<double> table;
    };
    struct Scaled {
        std::shared_ptr<const Strategy> base;
        double rho;
    };
    std::variant<FractionalKelly, Constant, Tabulated, Scaled> repr_{FractionalKelly{}};
};

/// delta / (1 + delta) * lambda_hat / sigma.
double kelly_fraction(double sigma, double lambda_hat, double delta);

/// The fractional Kelly strategy for `coeffs`; rejects a constant zero
/// volatility up front (non-constant paths are checked when realized).
Strategy fractional_kelly(const MarketCoefficients& coeffs);

/// The worst-case density generator eta_bar = (-lambda_hat/(1+delta), 0).
GeneratorSpec worst_case_generator(const MarketCoefficients& coeffs);

}  // namespace rfc
