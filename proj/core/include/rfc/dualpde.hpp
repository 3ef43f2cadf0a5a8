#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace rfc {

/// Convex penalty integrand g(eta) on R^2; an empty optional means +infinity.
class PenaltyIntegrand {
public:
    /// delta/2 |eta|^2.
    static PenaltyIntegrand quadratic(double delta);
    /// delta/2 |eta|^2 on the ball |eta| <= cap, infinite outside.
    static PenaltyIntegrand quadratic_capped(double delta, double cap);
    /// values[i * eta2.size() + j] at (eta1[i], eta2[j]); infinite off the
    /// grid and wherever the entry is not finite.
    static PenaltyIntegrand tabulated(std::vector<double> eta1, std::vector<double> eta2,
                                      std::vector<double> values);
    /// 0 at eta = 0, infinite elsewhere (no ambiguity).
    static PenaltyIntegrand zero_only();

    std::optional<double> value(std::array<double, 2> eta) const;
    nlohmann::json describe() const;

    /// {"type": "quadratic", "delta": d} | {"type": "quadratic_capped", "delta": d, "cap": c} |
    /// {"type": "tabulated", "eta1": [...], "eta2": [...], "values": [...]} | {"type": "zero_only"}
    static PenaltyIntegrand from_json(const nlohmann::json& j);

    struct Quadratic {
        double delta;
    };
    struct Capped {
        double delta;
        double cap;
    };
    struct Tabulated {
        std::vector<double> eta1, eta2, values;
    };
    struct ZeroOnly {};
    using Repr = std::variant<Quadratic, Capped, Tabulated, ZeroOnly>;
    const Repr& repr() const noexcept { return repr_; }

private:
    Repr repr_{ZeroOnly{}};
};

/// inf over eta of g(eta) + kappa/2 (eta1 + lambda_hat)^2 + a . eta.
struct HamiltonianMin {
    bool unbounded = false;
    double value = 0.0;
    std::array<double, 2> minimizer{0.0, 0.0};
};

HamiltonianMin minimize_hamiltonian(const PenaltyIntegrand& g, double kappa, double lambda_hat,
                                    std::array<double, 2> a = {0.0, 0.0});

struct DriftResult {
    bool unbounded = false;
    double b = 0.0;
    std::array<double, 2> minimizer{0.0, 0.0};
    std::string method;
    /// Nonzero volatility: no closed-form counterpart in the log example.
    bool exploratory = false;

    nlohmann::json to_json() const;
};

/// b = -inf_eta {g(eta) + (eta1 + lambda_hat)^2 / 2 + a . eta}, by nested
/// golden section (exact enumeration for tabulated g).
DriftResult drift_from_relation(const PenaltyIntegrand& g, std::array<double, 2> a, double lambda_hat);

/// The same infimum by brute force over the square [-half_width, half_width]^2
/// at spacing `step` (plus the origin for zero_only).
DriftResult drift_dense_grid(const PenaltyIntegrand& g, std::array<double, 2> a, double lambda_hat,
                             double half_width = 2.0, double step = 1e-4, int threads = 0);

/// A dual field sampled on a log-spaced y grid and a uniform time grid:
/// V[k][j] = V(y[j], t[k]).
struct DualFieldSample {
    std::vector<double> y;
    std::vector<double> t;
    std::vector<std::vector<double>> V;
};

/// Log-spaced y grid on [y_min, y_max] with n_y points; V = -ln y - 1 + A(t).
DualFieldSample sample_log_dual(double y_min, double y_max, std::size_t n_y,
                                const std::vector<double>& times, const std::vector<double>& A);

struct HjbResidual {
    double max_abs = 0.0;
    std::size_t arg_y = 0;
    std::size_t arg_t = 0;
    /// residual[k][j] on interior nodes (k = 1..n_t-2, j = 1..n_y-2), 0 on the boundary.
    std::vector<std::vector<double>> residual;
    /// Rounding amplification of the second difference, 4 eps max|V| / h^2.
    double rounding_bound = 0.0;
    double h_log_y = 0.0;
    double dt = 0.0;

    nlohmann::json to_json() const;
};

/// residual = dV/dt + inf_eta {g(eta) + y^2 V_yy / 2 (eta1 + lambda_hat)^2} with
/// central differences in t and in ln y. lambda_hat holds one value per time
/// node.
HjbResidual hjb_residual(const DualFieldSample& V, const PenaltyIntegrand& g,
                         const std::vector<double>& lambda_hat, int threads = 0);

/// CSV rows y,t,residual over interior nodes.
void write_residual_csv(std::ostream& out, const DualFieldSample& V, const HjbResidual& r);

}  // namespace rfc
