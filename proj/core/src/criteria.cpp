#include "rfc/criteria.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rfc {

namespace {

std::vector<double> accumulate_drift(const std::vector<double>& rate, double dt)
{
    // A_{k+1} = A_k - rate_k dt, rate_k >= 0 for the criteria built here.
    std::vector<double> A(rate.size() + 1, 0.0);
    for (std::size_t k = 0; k < rate.size(); ++k)
        A[k + 1] = A[k] - rate[k] * dt;
    return A;
}

void require_positive(double v, const char* what)
{
    if (!(v > 0.0))
        throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

CriterionField::CriterionField(std::shared_ptr<const CoefficientTable> coeffs)
    : coeffs_(std::move(coeffs))
{
    if (!coeffs_)
        throw std::invalid_argument("CriterionField: missing coefficients");
    std::vector<double> rate(coeffs_->size());
    for (std::size_t k = 0; k < rate.size(); ++k) {
        const double d = coeffs_->delta[k];
        const double l = coeffs_->lambda_hat[k];
        rate[k] = 0.5 * d / (1.0 + d) * l * l;
    }
    A_ = accumulate_drift(rate, coeffs_->grid.dt());
}

double CriterionField::primal(double x, std::size_t k) const
{
    require_positive(x, "wealth x");
    return std::log(x) + A_.at(k);
}

double CriterionField::dual(double y, std::size_t k) const
{
    require_positive(y, "dual variable y");
    return -std::log(y) - 1.0 + A_.at(k);
}

CriterionField field_log(const MarketCoefficients& coeffs, const TimeGrid& grid)
{
    return CriterionField(std::make_shared<const CoefficientTable>(realize(coeffs, grid)));
}

double dual_eval(const CriterionField& field, double y, double t)
{
    return field.dual(y, field.grid().index_of(t));
}

double primal_eval(const CriterionField& field, double x, double t)
{
    return field.primal(x, field.grid().index_of(t));
}

double conjugate_on_grid(const std::function<double(double)>& U, double y,
                         std::span<const double> x_grid)
{
    if (x_grid.empty())
        throw std::invalid_argument("conjugate_on_grid: empty x grid");
    double best = -std::numeric_limits<double>::infinity();
    for (double x : x_grid)
        best = std::max(best, U(x) - x * y);
    return best;
}

namespace {

CriterionProcess build_process(const CriterionField& field, const WealthPath& wealth,
                               const MeasureChange& mc, double t,
                               const std::function<double(std::size_t)>& increment)
{
    require_same_grid(field.grid(), mc.grid, "criterion_process");
    const std::size_t n = field.grid().n_steps();
    if (wealth.X.size() != n + 1)
        throw std::invalid_argument("grid mismatch: wealth path length differs from the field grid");
    CriterionProcess p{field.grid().index_of(t), std::vector<double>(n + 1)};
    double acc = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        if (k > p.anchor)
            acc += increment(k - 1);
        p.N[k] = field.primal(wealth.X[k], k) + acc;
    }
    return p;
}

}  // namespace

CriterionProcess criterion_process(const CriterionField& field, const WealthPath& wealth,
                                   const MeasureChange& mc, double t)
{
    const auto& delta = field.coeffs().delta;
    const double dt = field.grid().dt();
    return build_process(field, wealth, mc, t, [&](std::size_t j) {
        return 0.5 * delta[j] * (mc.eta1[j] * mc.eta1[j] + mc.eta2[j] * mc.eta2[j]) * dt;
    });
}

CriterionProcess criterion_process(const CriterionField& field, const WealthPath& wealth,
                                   const MeasureChange& mc, double t, const PenaltySpec& spec)
{
    const double dt = field.grid().dt();
    switch (spec.kind()) {
    case PenaltySpec::Kind::Quadratic: {
        const auto delta = spec.delta_path().realize(field.grid());
        return build_process(field, wealth, mc, t, [&](std::size_t j) {
            return 0.5 * delta[j] * (mc.eta1[j] * mc.eta1[j] + mc.eta2[j] * mc.eta2[j]) * dt;
        });
    }
    case PenaltySpec::Kind::Entropic: {
        const double d = spec.entropic_delta();
        return build_process(field, wealth, mc, t, [&](std::size_t j) {
            return d * (std::log(mc.D[j + 1]) - std::log(mc.D[j]));
        });
    }
    default:
        throw std::invalid_argument(
            "criterion_process: penalty must be quadratic or entropic, got " +
            spec.describe().at("type").get<std::string>());
    }
}

std::vector<double> equivalent_mpr(const CoefficientTable& coeffs)
{
    std::vector<double> out(coeffs.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double d = coeffs.delta[k];
        out[k] = d / (1.0 + d) * coeffs.lambda_hat[k];
    }
    return out;
}

std::vector<double> equivalent_mpr(const MarketCoefficients& coeffs, const TimeGrid& grid)
{
    return equivalent_mpr(realize(coeffs, grid));
}

StandardForwardField::StandardForwardField(TimeGrid grid, std::vector<double> mpr)
    : grid_(grid), m_(std::move(mpr))
{
    if (m_.size() != grid_.n_steps())
        throw std::invalid_argument("grid mismatch: market price of risk length differs from grid");
    std::vector<double> rate(m_.size());
    for (std::size_t k = 0; k < m_.size(); ++k)
        rate[k] = 0.5 * m_[k] * m_[k];
    A_ = accumulate_drift(rate, grid_.dt());
}

double StandardForwardField::primal(double x, std::size_t k) const
{
    require_positive(x, "wealth x");
    return std::log(x) + A_.at(k);
}

double EquivalentFields::tilted(double x, std::size_t k) const
{
    require_positive(x, "wealth x");
    return std::log(x) + tilted_drift.at(k);
}

double EquivalentFields::reference(double x, std::size_t k) const
{
    return D.at(k) * tilted(x, k);
}

EquivalentFields equivalent_standard_fields(const CriterionField& field, const MeasureChange& mc_bar)
{
    require_same_grid(field.grid(), mc_bar.grid, "equivalent_standard_fields");
    const auto& c = field.coeffs();
    const std::size_t n = c.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double target = -c.lambda_hat[k] / (1.0 + c.delta[k]);
        const double tol = 1e-12 * std::max(1.0, std::abs(target));
        if (std::abs(mc_bar.eta1[k] - target) > tol || std::abs(mc_bar.eta2[k]) > tol)
            throw std::invalid_argument("equivalent_standard_fields: generator at step " +
                                        std::to_string(k) + " is not the saddle generator");
    }
    const double dt = field.grid().dt();
    auto lbar = equivalent_mpr(c);
    EquivalentFields out{StandardForwardField(field.grid(), lbar), {}, {}, {}, mc_bar.D};
    out.penalty_integral.assign(n + 1, 0.0);
    out.tilted_drift.assign(n + 1, 0.0);
    out.kelly.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double e1 = mc_bar.eta1[k], e2 = mc_bar.eta2[k];
        out.penalty_integral[k + 1] =
            out.penalty_integral[k] + 0.5 * c.delta[k] * (e1 * e1 + e2 * e2) * dt;
        out.kelly[k] = lbar[k] / c.sigma[k];
    }
    for (std::size_t k = 0; k <= n; ++k)
        out.tilted_drift[k] = field.drift(k) + out.penalty_integral[k];
    return out;
}

void write_field_csv(std::ostream& out, const CriterionField& field)
{
    const auto lbar = equivalent_mpr(field.coeffs());
    out << "t,A,lambda_bar\n" << std::setprecision(17);
    for (std::size_t k = 0; k <= field.grid().n_steps(); ++k) {
        out << field.grid().time(k) << ',' << field.drift(k) << ',';
        if (k < lbar.size())
            out << lbar[k];
        out << '\n';
    }
}

}  // namespace rfc
