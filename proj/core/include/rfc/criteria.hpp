#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "rfc/coefficients.hpp"
#include "rfc/measures.hpp"
#include "rfc/paths.hpp"

namespace rfc {

/// The logarithmic robust forward criterion U(x, t_k) = ln x + A_k with
/// A_k = -1/2 sum_{j<k} delta_j / (1 + delta_j) lambda_hat_j^2 dt, and its
/// dual V(y, t_k) = -ln y - 1 + A_k.
class CriterionField {
public:
    explicit CriterionField(std::shared_ptr<const CoefficientTable> coeffs);

    const TimeGrid& grid() const noexcept { return coeffs_->grid; }
    const CoefficientTable& coeffs() const noexcept { return *coeffs_; }
    std::shared_ptr<const CoefficientTable> coeffs_ptr() const noexcept { return coeffs_; }

    double drift(std::size_t k) const { return A_.at(k); }
    const std::vector<double>& drift_path() const noexcept { return A_; }

    /// Throws on x <= 0.
    double primal(double x, std::size_t k) const;
    /// Throws on y <= 0.
    double dual(double y, std::size_t k) const;

private:
    std::shared_ptr<const CoefficientTable> coeffs_;
    std::vector<double> A_;
};

CriterionField field_log(const MarketCoefficients& coeffs, const TimeGrid& grid);

/// V(y, t) at a grid time t.
double dual_eval(const CriterionField& field, double y, double t);
/// U(x, t) at a grid time t.
double primal_eval(const CriterionField& field, double x, double t);

/// max over the x grid of U(x) - x y; a brute-force conjugate used to check
/// closed forms.
double conjugate_on_grid(const std::function<double(double)>& U, double y,
                         std::span<const double> x_grid);

/// N_k = U(X_k, t_k) + sum_{anchor <= j < k} penalty increment_j.
/// Entries before the anchor carry U(X_k, t_k) only.
struct CriterionProcess {
    std::size_t anchor = 0;
    std::vector<double> N;
};

/// Quadratic penalty with the field's own delta: increments delta_j/2 |eta_j|^2 dt.
CriterionProcess criterion_process(const CriterionField& field, const WealthPath& wealth,
                                   const MeasureChange& mc, double t);
/// Quadratic (own delta path) or entropic (delta * (ln D_{k+1} - ln D_k))
/// increments; other penalty kinds are rejected.
CriterionProcess criterion_process(const CriterionField& field, const WealthPath& wealth,
                                   const MeasureChange& mc, double t, const PenaltySpec& spec);

/// lambda_bar_k = delta_k / (1 + delta_k) lambda_hat_k.
std::vector<double> equivalent_mpr(const CoefficientTable& coeffs);
std::vector<double> equivalent_mpr(const MarketCoefficients& coeffs, const TimeGrid& grid);

/// ln x - 1/2 sum_{j<k} m_j^2 dt.
class StandardForwardField {
public:
    StandardForwardField(TimeGrid grid, std::vector<double> mpr);

    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& mpr() const noexcept { return m_; }
    double drift(std::size_t k) const { return A_.at(k); }
    const std::vector<double>& drift_path() const noexcept { return A_; }
    double primal(double x, std::size_t k) const;

private:
    TimeGrid grid_;
    std::vector<double> m_;
    std::vector<double> A_;
};

/// Fields that rank strategies like the robust criterion.
struct EquivalentFields {
    /// Standard forward field of the market with price of risk lambda_bar.
    StandardForwardField lambda_bar_field;
    /// int_0^{t_k} g(eta_bar) ds with g = delta/2 |eta|^2.
    std::vector<double> penalty_integral;
    /// Drift of the tilted field U~(x, t) = U(x, t) + int g(eta_bar) ds.
    std::vector<double> tilted_drift;
    /// Kelly fraction of the lambda_bar market, lambda_bar_k / sigma_k.
    std::vector<double> kelly;
    /// Density path of eta_bar used for the reference-market field.
    std::vector<double> D;

    double tilted(double x, std::size_t k) const;
    /// D_k * U~(x, t_k), the tilted field read in the reference market.
    double reference(double x, std::size_t k) const;
};

/// `mc_bar` must carry the saddle generator (-lambda_hat/(1+delta), 0) of
/// `field`'s coefficients; throws otherwise.
EquivalentFields equivalent_standard_fields(const CriterionField& field, const MeasureChange& mc_bar);

/// CSV rows t,A,lambda_bar (lambda_bar empty at the horizon).
void write_field_csv(std::ostream& out, const CriterionField& field);

}  // namespace rfc
