#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfc/criteria.hpp"
#include "rfc/generator.hpp"
#include "rfc/measures.hpp"
#include "rfc/stats.hpp"
#include "rfc/strategies.hpp"

namespace rfc {

enum class Verdict { MartingaleConsistent, SubmartingaleConsistent, Violation };

std::string to_string(Verdict v);

/// Standard-error multiple used by every verdict.
inline constexpr double kStderrMultiple = 3.0;

/// |est| <= 3 se: martingale; est > 3 se: submartingale; otherwise violation.
Verdict classify(double estimate, double std_error);
/// est <= 3 se.
bool supermartingale_consistent(double estimate, double std_error);

struct DriftReport {
    double t = 0.0;
    double T = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    Verdict verdict = Verdict::Violation;
    std::string method = "shift";
    bool antithetic = false;
    /// Conditional estimates per frozen state when t > 0.
    std::vector<MeanStderr> per_state;
    /// Set by the dual test for the pair (nu = 0, eta_bar).
    bool equality_case = false;

    bool submartingale_consistent() const { return verdict != Verdict::Violation; }
    bool martingale_consistent() const { return verdict == Verdict::MartingaleConsistent; }
    nlohmann::json to_json() const;
};

struct DriftOptions {
    /// Pair each draw with its negation; n_paths then counts both halves.
    bool antithetic = false;
    int threads = 0;
    /// Frozen states at t > 0; inner paths per state = n_paths / outer_paths.
    std::size_t outer_paths = 32;
    /// Reweight P-paths by D_T instead of simulating under Q (t = 0 only).
    bool reweight = false;
    double x0 = 1.0;
    double S0 = 1.0;
};

/// Estimates E^{Q^eta}[N_T - N_t] for the criterion process of (strategy,
/// generator) under a quadratic or entropic penalty.
DriftReport drift_test(const CriterionField& field, const Strategy& strategy,
                       const GeneratorSpec& generator, const PenaltySpec& spec, double t, double T,
                       std::size_t n_paths, std::uint64_t seed, const DriftOptions& options = {});

/// E^{Q^eta}[ln X_T - ln X_t] for the strategy, with the same draws as
/// drift_test; used to compare strategies under a fixed measure.
MeanStderr expected_log_growth(const CriterionField& field, const Strategy& strategy,
                               const GeneratorSpec& generator, double t, double T,
                               std::size_t n_paths, std::uint64_t seed,
                               const DriftOptions& options = {});

/// Paired difference of expected_log_growth(a) - expected_log_growth(b) on
/// common draws.
MeanStderr log_growth_difference(const CriterionField& field, const Strategy& a, const Strategy& b,
                                 const GeneratorSpec& generator, double t, double T,
                                 std::size_t n_paths, std::uint64_t seed,
                                 const DriftOptions& options = {});

struct VertexFit {
    double vertex = 0.0;
    double half_width = 0.0;  ///< 3 standard errors, floored at kVertexFloor
    double curvature = 0.0;   ///< quadratic coefficient
    bool within = false;      ///< |vertex - 1| <= half_width
};

/// Half-width floor for fits whose per-path coefficients do not vary.
inline constexpr double kVertexFloor = 1e-9;

struct SaddleCheck {
    std::string name;
    bool pass = false;
    double worst_margin = 0.0;  ///< most adverse (value - bound) over the cells checked
};

struct SaddleReport {
    double x = 1.0;
    double t = 0.0;
    double T = 0.0;
    std::vector<double> rho_grid;
    std::vector<double> c_grid;
    /// value[i][j] at (rho_grid[i], c_grid[j]).
    std::vector<std::vector<MeanStderr>> value;
    double target = 0.0;  ///< U(x, t)
    std::vector<SaddleCheck> checks;
    VertexFit rho_fit;
    VertexFit c_fit;
    bool saddle = false;

    nlohmann::json to_json() const;
};

struct ScanOptions {
    int threads = 0;
    double x = 1.0;
    double S0 = 1.0;
};

/// Value surface E^{Q^{c eta_bar}}[U(X_T^{rho pi_bar}, T)] + gamma_{t,T}(Q^{c eta_bar})
/// started from wealth x at t. All cells share the same normal draws.
SaddleReport self_generation_scan(const CriterionField& field, double t, double T,
                                  const std::vector<double>& rho_grid,
                                  const std::vector<double>& c_grid, std::size_t n_paths,
                                  std::uint64_t seed, const ScanOptions& options = {});

/// CSV rows rho,c,estimate,stderr.
void write_surface_csv(std::ostream& out, const SaddleReport& report);

/// Estimates E^Q[V(y Z_T / D_T, T)] + gamma_{t,T}(Q) - V(y, t) with Z the
/// state density of `nu` and Q = Q^eta; ratios are taken from t.
DriftReport dual_submartingale_test(const CriterionField& field, const CoefficientPath& nu,
                                    const GeneratorSpec& generator, const PenaltySpec& spec,
                                    double y, double t, double T, std::size_t n_paths,
                                    std::uint64_t seed, const DriftOptions& options = {});

}  // namespace rfc
