#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfc/grid.hpp"

namespace rfc {

/// A scalar coefficient along the time grid: a constant, a deterministic
/// function of t, or a per-step table. Values are taken at the left end of
/// each step.
class CoefficientPath {
public:
    using Function = std::function<double(double)>;

    CoefficientPath(double constant = 0.0) : repr_(constant) {}  // NOLINT(implicit)
    static CoefficientPath constant(double v) { return CoefficientPath(v); }
    static CoefficientPath function(Function f, std::string label = "function");
    static CoefficientPath tabulated(std::vector<double> per_step);

    /// Values at t_0 .. t_{n-1}. Throws on non-finite values or a table whose
    /// length differs from grid.n_steps().
    std::vector<double> realize(const TimeGrid& grid) const;

    /// Value at step k of `grid` (left endpoint t_k).
    double at(const TimeGrid& grid, std::size_t k) const;

    bool is_constant() const noexcept { return std::holds_alternative<double>(repr_); }
    double constant_value() const { return std::get<double>(repr_); }

    nlohmann::json describe() const;

private:
    struct Labeled {
        Function f;
        std::string label;
    };
    std::variant<double, Labeled, std::vector<double>> repr_;
};

/// sigma (volatility), lambda_hat (estimated market price of risk) and delta
/// (confidence in the estimate).
struct MarketCoefficients {
    CoefficientPath sigma{0.2};
    CoefficientPath lambda_hat{0.0};
    CoefficientPath delta{0.0};

    nlohmann::json describe() const;
};

/// Realized per-step coefficient values on a specific grid.
struct CoefficientTable {
    TimeGrid grid;
    std::vector<double> sigma;
    std::vector<double> lambda_hat;
    std::vector<double> delta;

    std::size_t size() const noexcept { return sigma.size(); }
};

/// Realize and validate: sigma_k != 0, delta_k >= 0, all finite.
CoefficientTable realize(const MarketCoefficients& coeffs, const TimeGrid& grid);

}  // namespace rfc
