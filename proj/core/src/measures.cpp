#include "rfc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rfc/parallel.hpp"
#include "rfc/stats.hpp"

namespace rfc {

MeasureChange doleans(std::span<const double> eta1, std::span<const double> eta2,
                      const PathBundle& bundle)
{
    const std::size_t n = bundle.grid.n_steps();
    if (eta1.size() != n || eta2.size() != n)
        throw std::invalid_argument("grid mismatch: generator length differs from the bundle grid");
    MeasureChange mc{bundle.grid, std::vector<double>(eta1.begin(), eta1.end()),
                     std::vector<double>(eta2.begin(), eta2.end()), std::vector<double>(n + 1, 1.0)};
    const double dt = bundle.grid.dt();
    double log_d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(eta1[k]) || !std::isfinite(eta2[k]))
            throw std::invalid_argument("doleans: non-finite generator value at step " +
                                        std::to_string(k));
        if (k >= bundle.start)
            log_d += eta1[k] * bundle.dW1[k] + eta2[k] * bundle.dW2[k] -
                     0.5 * (eta1[k] * eta1[k] + eta2[k] * eta2[k]) * dt;
        mc.D[k + 1] = std::exp(log_d);
    }
    return mc;
}

MeasureChange doleans(const GeneratorSpec& generator, const PathBundle& bundle)
{
    const std::size_t n = bundle.grid.n_steps();
    std::vector<double> e1(n, 0.0), e2(n, 0.0);
    for (std::size_t k = bundle.start; k < n; ++k) {
        const auto eta = generator.at(bundle.state(k), bundle.grid);
        e1[k] = eta[0];
        e2[k] = eta[1];
    }
    return doleans(e1, e2, bundle);
}

StateDensity state_density(std::span<const double> nu, const PathBundle& bundle)
{
    const std::size_t n = bundle.grid.n_steps();
    if (nu.size() != n)
        throw std::invalid_argument("grid mismatch: nu length differs from the bundle grid");
    StateDensity sd{std::vector<double>(nu.begin(), nu.end()), std::vector<double>(n + 1, 1.0)};
    const double dt = bundle.grid.dt();
    double log_z = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k >= bundle.start) {
            const double lam = bundle.coeffs->lambda_hat[k];
            log_z += -lam * bundle.dW1[k] - nu[k] * bundle.dW2[k] -
                     0.5 * (lam * lam + nu[k] * nu[k]) * dt;
        }
        sd.Z[k + 1] = std::exp(log_z);
    }
    return sd;
}

PathBundle girsanov_shift(const PathBundle& bundle, const MeasureChange& mc)
{
    require_same_grid(bundle.grid, mc.grid, "girsanov_shift");
    PathBundle out = bundle;
    const double dt = bundle.grid.dt();
    for (std::size_t k = bundle.start; k < bundle.grid.n_steps(); ++k) {
        out.dW1[k] -= mc.eta1[k] * dt;
        out.dW2[k] -= mc.eta2[k] * dt;
    }
    return out;
}

// ---------------------------------------------------------------------------
// PenaltySpec

PenaltySpec PenaltySpec::quadratic(CoefficientPath delta)
{
    PenaltySpec p;
    p.repr_ = Quadratic{std::move(delta)};
    return p;
}

PenaltySpec PenaltySpec::entropic(double delta)
{
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("entropic penalty: delta must be finite and >= 0");
    PenaltySpec p;
    p.repr_ = Entropic{delta};
    return p;
}

PenaltySpec PenaltySpec::degenerate(std::vector<LambdaEntry> table)
{
    for (const auto& e : table)
        if (!(e.t <= e.T) || !std::isfinite(e.lambda))
            throw std::invalid_argument("degenerate penalty: entries need t <= T and finite lambda");
    PenaltySpec p;
    p.repr_ = Degenerate{std::move(table)};
    return p;
}

PenaltySpec PenaltySpec::reference_only() { return PenaltySpec{}; }

PenaltySpec::Kind PenaltySpec::kind() const noexcept
{
    return static_cast<Kind>(repr_.index());
}

const CoefficientPath& PenaltySpec::delta_path() const
{
    return std::get<Quadratic>(repr_).delta;
}

double PenaltySpec::entropic_delta() const { return std::get<Entropic>(repr_).delta; }

double PenaltySpec::lambda_for(double t, double T) const
{
    const auto& table = std::get<Degenerate>(repr_).table;
    for (const auto& e : table)
        if (std::abs(e.t - t) <= 1e-12 && std::abs(e.T - T) <= 1e-12)
            return e.lambda;
    throw std::invalid_argument("degenerate penalty: no lambda tabulated for (t, T) = (" +
                                std::to_string(t) + ", " + std::to_string(T) + ")");
}

nlohmann::json PenaltySpec::describe() const
{
    switch (kind()) {
    case Kind::Quadratic:
        return {{"type", "quadratic"}, {"delta", delta_path().describe()}};
    case Kind::Entropic:
        return {{"type", "entropic"}, {"delta", entropic_delta()}};
    case Kind::Degenerate: {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& e : std::get<Degenerate>(repr_).table)
            rows.push_back({{"t", e.t}, {"T", e.T}, {"lambda", e.lambda}});
        return {{"type", "degenerate"}, {"lambda", rows}};
    }
    case Kind::ReferenceOnly:
        break;
    }
    return {{"type", "reference_only"}};
}

// ---------------------------------------------------------------------------
// penalty_value

namespace {

bool generator_matches(const GeneratorSpec& g, const PathBundle& b, std::size_t from,
                       std::size_t to, double eta1, double eta2)
{
    if (!g.is_deterministic())
        return false;
    const double tol = 1e-12 * std::max({1.0, std::abs(eta1), std::abs(eta2)});
    for (std::size_t k = from; k < to; ++k) {
        const auto eta = g.at(b.state(k), b.grid);
        if (std::abs(eta[0] - eta1) > tol || std::abs(eta[1] - eta2) > tol)
            return false;
    }
    return true;
}

double quadratic_integral(const GeneratorSpec& g, const std::vector<double>& delta,
                          const PathBundle& b, std::size_t from, std::size_t to)
{
    const double dt = b.grid.dt();
    double sum = 0.0;
    for (std::size_t k = from; k < to; ++k) {
        const auto eta = g.at(b.state(k), b.grid);
        sum += 0.5 * delta[k] * (eta[0] * eta[0] + eta[1] * eta[1]) * dt;
    }
    return sum;
}

double log_density_increment(const GeneratorSpec& g, const PathBundle& b, std::size_t from,
                             std::size_t to)
{
    const double dt = b.grid.dt();
    double sum = 0.0;
    for (std::size_t k = from; k < to; ++k) {
        const auto eta = g.at(b.state(k), b.grid);
        sum += eta[0] * b.dW1[k] + eta[1] * b.dW2[k] - 0.5 * (eta[0] * eta[0] + eta[1] * eta[1]) * dt;
    }
    return sum;
}

template <typename PerPath>
PenaltyEstimate resimulated(const PathBundle& cond, std::size_t cond_index, std::size_t from,
                            const GeneratorSpec& g, const PenaltyOptions& opt, PerPath per_path)
{
    if (opt.inner_paths < 2)
        throw std::invalid_argument("penalty_value: need at least 2 inner paths");
    std::vector<double> samples(opt.inner_paths);
    parallel_for(opt.inner_paths, opt.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            PathRequest req;
            req.substream = {opt.seed,
                             streams::kResimBase | static_cast<std::uint32_t>(cond_index & 0x7fffffffu),
                             j};
            req.start = from;
            req.S_start = cond.S[from];
            req.measure = &g;
            samples[j] = per_path(simulate_path(cond.coeffs, req));
        }
    });
    const auto s = summarize(samples);
    return {false, s.mean, s.std_error, s.n};
}

}  // namespace

std::vector<PenaltyEstimate> penalty_value(const PenaltySpec& spec, const GeneratorSpec& generator,
                                           double t, double T,
                                           std::span<const PathBundle> conditioning,
                                           const PenaltyOptions& options)
{
    if (conditioning.empty())
        throw std::invalid_argument("penalty_value: empty conditioning ensemble");
    const TimeGrid& grid = conditioning.front().grid;
    const std::size_t ti = grid.index_of(t);
    const std::size_t Ti = grid.index_of(T);
    if (ti > Ti)
        throw std::invalid_argument("penalty_value: requires t <= T");

    std::vector<double> delta;
    if (spec.kind() == PenaltySpec::Kind::Quadratic)
        delta = spec.delta_path().realize(grid);
    for (double d : delta)
        if (d < 0.0)
            throw std::invalid_argument("quadratic penalty: delta must be non-negative");

    std::vector<PenaltyEstimate> out;
    out.reserve(conditioning.size());
    for (std::size_t i = 0; i < conditioning.size(); ++i) {
        const PathBundle& b = conditioning[i];
        require_same_grid(grid, b.grid, "penalty_value conditioning ensemble");
        switch (spec.kind()) {
        case PenaltySpec::Kind::Quadratic:
            if (generator.is_deterministic()) {
                out.push_back({false, quadratic_integral(generator, delta, b, ti, Ti), 0.0, 0});
            } else {
                out.push_back(resimulated(b, i, ti, generator, options, [&](const PathBundle& p) {
                    return quadratic_integral(generator, delta, p, ti, Ti);
                }));
            }
            break;
        case PenaltySpec::Kind::Entropic: {
            const double d = spec.entropic_delta();
            auto est = resimulated(b, i, ti, generator, options, [&](const PathBundle& p) {
                return log_density_increment(generator, p, ti, Ti);
            });
            est.estimate *= d;
            est.std_error *= d;
            out.push_back(est);
            break;
        }
        case PenaltySpec::Kind::Degenerate: {
            const double lam = spec.lambda_for(t, T);
            if (generator_matches(generator, b, ti, Ti, lam, 0.0))
                out.push_back({false, -(T - t) / 2.0 * lam * lam, 0.0, 0});
            else
                out.push_back(PenaltyEstimate::excluded());
            break;
        }
        case PenaltySpec::Kind::ReferenceOnly:
            if (generator.is_zero() || generator_matches(generator, b, ti, Ti, 0.0, 0.0))
                out.push_back({false, 0.0, 0.0, 0});
            else
                out.push_back(PenaltyEstimate::excluded());
            break;
        }
    }
    return out;
}

nlohmann::json penalty_report(const PenaltySpec& spec, double t, double T,
                              const PenaltyEstimate& value)
{
    nlohmann::json j{{"spec", spec.describe()}, {"t", t}, {"T", T}, {"n_paths", value.n_paths}};
    if (value.infinite) {
        j["estimate"] = "infinite";
        j["stderr"] = nullptr;
    } else {
        j["estimate"] = value.estimate;
        j["stderr"] = value.std_error;
    }
    return j;
}

CocycleResidual cocycle_residual(const PenaltySpec& spec, const GeneratorSpec& generator,
                                 std::shared_ptr<const CoefficientTable> coeffs, double t,
                                 std::size_t outer_paths, const PenaltyOptions& options, double S0)
{
    if (!coeffs)
        throw std::invalid_argument("cocycle_residual: missing coefficients");
    const TimeGrid& grid = coeffs->grid;
    const double T = grid.horizon();
    const std::size_t n = grid.n_steps();
    PathBundle root{grid, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                    std::vector<double>(n + 1, S0), coeffs, 0, options.seed, 0};
    const std::vector<PathBundle> root_only{root};

    CocycleResidual r;
    r.whole = penalty_value(spec, generator, 0.0, T, root_only, options).front();
    r.head = penalty_value(spec, generator, 0.0, t, root_only, options).front();

    std::vector<PathBundle> outer(outer_paths, root);
    for (std::size_t i = 0; i < outer_paths; ++i) {
        PathRequest req;
        req.substream = {options.seed, streams::kOuterBase, i};
        req.S_start = S0;
        req.measure = &generator;
        outer[i] = simulate_path(coeffs, req);
    }
    PenaltyOptions tail_opt = options;
    tail_opt.seed = options.seed + 0x9E3779B97F4A7C15ull;
    const auto tails = penalty_value(spec, generator, t, T, outer, tail_opt);

    r.infinite = r.whole.infinite || r.head.infinite;
    std::vector<double> tail_values;
    for (const auto& e : tails) {
        r.infinite = r.infinite || e.infinite;
        tail_values.push_back(e.estimate);
    }
    if (r.infinite)
        return r;
    const auto tail = outer_paths >= 2 ? summarize(tail_values)
                                       : MeanStderr{tail_values.front(), tails.front().std_error, 1};
    r.tail_mean = {false, tail.mean, tail.std_error, tail.n};
    r.residual = r.whole.estimate - r.head.estimate - tail.mean;
    r.std_error = std::sqrt(r.whole.std_error * r.whole.std_error +
                            r.head.std_error * r.head.std_error + tail.std_error * tail.std_error);
    return r;
}

}  // namespace rfc
