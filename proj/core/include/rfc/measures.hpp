#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfc/coefficients.hpp"
#include "rfc/generator.hpp"
#include "rfc/paths.hpp"

namespace rfc {

/// A density generator realized along one scenario together with its
/// discrete Doleans exponential D_{k+1} = D_k exp(eta . dW_k - |eta_k|^2 dt / 2).
struct MeasureChange {
    TimeGrid grid;
    std::vector<double> eta1;  ///< n_steps entries
    std::vector<double> eta2;
    std::vector<double> D;     ///< n_steps + 1 entries, D_0 = 1
};

/// Z^nu, the exponential of -int lambda_hat dW1 - int nu dW2.
struct StateDensity {
    std::vector<double> nu;
    std::vector<double> Z;
};

MeasureChange doleans(std::span<const double> eta1, std::span<const double> eta2,
                      const PathBundle& bundle);
/// Realizes `generator` along the bundle's states, then builds D.
MeasureChange doleans(const GeneratorSpec& generator, const PathBundle& bundle);

StateDensity state_density(std::span<const double> nu, const PathBundle& bundle);

/// Re-expresses the scenario with Q^eta-Brownian increments dW_k - eta_k dt.
PathBundle girsanov_shift(const PathBundle& bundle, const MeasureChange& mc);

/// Tagged penalty value; an excluded measure is `infinite`, never a float inf.
struct PenaltyEstimate {
    bool infinite = false;
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;

    static PenaltyEstimate excluded() { return {true, 0.0, 0.0, 0}; }
};

struct LambdaEntry {
    double t;
    double T;
    double lambda;
};

/// Penalty families gamma_{t,T}(Q^eta).
class PenaltySpec {
public:
    /// E^Q[ int_t^T delta_u / 2 |eta_u|^2 du | F_t ].
    static PenaltySpec quadratic(CoefficientPath delta);
    /// delta * H(Q^eta | P) on [t, T] for a constant delta.
    static PenaltySpec entropic(double delta);
    /// -(T - t) lambda_{t,T}^2 / 2 on its single admitted generator
    /// (lambda_{t,T}, 0); every other generator is excluded.
    static PenaltySpec degenerate(std::vector<LambdaEntry> table);
    /// Zero at eta == 0, excluded otherwise.
    static PenaltySpec reference_only();

    enum class Kind { Quadratic, Entropic, Degenerate, ReferenceOnly };
    Kind kind() const noexcept;

    const CoefficientPath& delta_path() const;      ///< Quadratic only
    double entropic_delta() const;                  ///< Entropic only
    /// Degenerate only; throws when (t, T) is not tabulated.
    double lambda_for(double t, double T) const;

    nlohmann::json describe() const;

private:
    struct Quadratic {
        CoefficientPath delta;
    };
    struct Entropic {
        double delta;
    };
    struct Degenerate {
        std::vector<LambdaEntry> table;
    };
    struct ReferenceOnly {};
    std::variant<Quadratic, Entropic, Degenerate, ReferenceOnly> repr_{ReferenceOnly{}};
};

struct PenaltyOptions {
    std::size_t inner_paths = 4096;  ///< sub-paths per conditioning scenario
    std::uint64_t seed = 1;
    int threads = 0;
};

/// gamma_{t,T}(Q^eta) for each conditioning scenario. Conditional
/// expectations are estimated by resimulating sub-paths under Q^eta from the
/// frozen state (t, S_t); deterministic quadratic integrands are summed
/// exactly (std_error 0).
std::vector<PenaltyEstimate> penalty_value(const PenaltySpec& spec, const GeneratorSpec& generator,
                                           double t, double T,
                                           std::span<const PathBundle> conditioning,
                                           const PenaltyOptions& options = {});

/// {spec, t, T, estimate, stderr, n_paths}
nlohmann::json penalty_report(const PenaltySpec& spec, double t, double T,
                              const PenaltyEstimate& value);

/// gamma_{s,T}(Q) - gamma_{s,t}(Q) - E^Q[gamma_{t,T}(Q) | F_s] at s = 0,
/// starting from S_0. `infinite` when any of the terms is excluded.
struct CocycleResidual {
    bool infinite = false;
    double residual = 0.0;
    double std_error = 0.0;
    PenaltyEstimate whole, head, tail_mean;
};
CocycleResidual cocycle_residual(const PenaltySpec& spec, const GeneratorSpec& generator,
                                 std::shared_ptr<const CoefficientTable> coeffs, double t,
                                 std::size_t outer_paths, const PenaltyOptions& options = {},
                                 double S0 = 1.0);

}  // namespace rfc
