#include "rfc/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rfc/parallel.hpp"
#include "rfc/paths.hpp"

namespace rfc {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::MartingaleConsistent:
        return "martingale-consistent";
    case Verdict::SubmartingaleConsistent:
        return "submartingale-consistent";
    case Verdict::Violation:
        break;
    }
    return "violation";
}

Verdict classify(double estimate, double std_error)
{
    const double band = kStderrMultiple * std_error;
    if (std::abs(estimate) <= band)
        return Verdict::MartingaleConsistent;
    if (estimate > band)
        return Verdict::SubmartingaleConsistent;
    return Verdict::Violation;
}

bool supermartingale_consistent(double estimate, double std_error)
{
    return estimate <= kStderrMultiple * std_error;
}

namespace {

nlohmann::json stats_json(const MeanStderr& s)
{
    return {{"estimate", s.mean}, {"stderr", s.std_error}, {"n", s.n}};
}

}  // namespace

nlohmann::json DriftReport::to_json() const
{
    nlohmann::json j{{"t", t},
                     {"T", T},
                     {"estimate", estimate},
                     {"stderr", std_error},
                     {"n_paths", n_paths},
                     {"verdict", rfc::to_string(verdict)},
                     {"method", method},
                     {"antithetic", antithetic}};
    if (!per_state.empty()) {
        auto rows = nlohmann::json::array();
        for (const auto& s : per_state)
            rows.push_back(stats_json(s));
        j["per_state"] = rows;
    }
    if (equality_case)
        j["equality_case"] = true;
    return j;
}

// ---------------------------------------------------------------------------
// Sampling engine shared by the tests. Inner paths run from t to T under the
// chosen measure; for t > 0 they restart from frozen outer states.

namespace {

struct Window {
    std::shared_ptr<const CoefficientTable> table;
    std::size_t ti = 0;
    std::size_t Ti = 0;
    const GeneratorSpec* measure = nullptr;
    std::uint64_t seed = 0;
    double S0 = 1.0;
};

struct Estimate {
    MeanStderr pooled;
    std::vector<MeanStderr> per_state;
};

// Standard errors below the rounding noise of the samples carry no
// information; floor them there so exact estimators still classify cleanly.
double rounding_floor(std::span<const double> samples)
{
    double scale = 1.0;
    for (double s : samples)
        scale = std::max(scale, std::abs(s));
    return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

MeanStderr floored(MeanStderr s, std::span<const double> samples)
{
    s.std_error = std::max(s.std_error, rounding_floor(samples));
    return s;
}

// f(inner, outer_or_null) -> sample.
template <typename F>
Estimate run_window(const Window& w, std::size_t n_paths, const DriftOptions& opt, F f)
{
    if (n_paths < 2)
        throw std::invalid_argument("need at least 2 paths");
    const std::size_t per_draw = opt.antithetic ? 2 : 1;

    auto sample_at = [&](std::uint32_t stream, std::uint64_t index, std::size_t start, double S,
                         const PathBundle* outer) {
        double acc = 0.0;
        for (std::size_t a = 0; a < per_draw; ++a) {
            PathRequest req;
            req.substream = {w.seed, stream, index};
            req.start = start;
            req.S_start = S;
            req.measure = w.measure;
            req.antithetic = a == 1;
            acc += f(simulate_path(w.table, req), outer);
        }
        return acc / static_cast<double>(per_draw);
    };

    Estimate est;
    if (w.ti == 0) {
        const std::size_t draws = n_paths / per_draw;
        if (draws < 2)
            throw std::invalid_argument("need at least 2 independent draws");
        std::vector<double> samples(draws);
        parallel_for(draws, opt.threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                samples[i] = sample_at(streams::kReference, i, 0, w.S0, nullptr);
        });
        est.pooled = floored(summarize(samples), samples);
        est.pooled.n = draws * per_draw;
        return est;
    }

    const std::size_t n_outer = std::min(opt.outer_paths, n_paths);
    if (n_outer < 2)
        throw std::invalid_argument("conditional tests need at least 2 frozen states");
    const std::size_t inner = n_paths / n_outer / per_draw;
    if (inner < 2)
        throw std::invalid_argument("conditional tests need at least 2 draws per frozen state");

    std::vector<PathBundle> outer(n_outer, PathBundle{w.table->grid, {}, {}, {}, w.table, 0, w.seed, 0});
    parallel_for(n_outer, opt.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            PathRequest req;
            req.substream = {w.seed, streams::kOuterBase, i};
            req.S_start = w.S0;
            req.measure = w.measure;
            outer[i] = simulate_path(w.table, req);
        }
    });
    std::vector<double> samples(n_outer * inner);
    parallel_for(samples.size(), opt.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t idx = b; idx < e; ++idx) {
            const std::size_t i = idx / inner, j = idx % inner;
            samples[idx] = sample_at(streams::kResimBase | static_cast<std::uint32_t>(i), j, w.ti,
                                     outer[i].S[w.ti], &outer[i]);
        }
    });
    std::vector<double> means(n_outer);
    for (std::size_t i = 0; i < n_outer; ++i) {
        std::span<const double> block(samples.data() + i * inner, inner);
        est.per_state.push_back(floored(summarize(block), block));
        est.per_state.back().n = inner * per_draw;
        means[i] = est.per_state.back().mean;
    }
    // Between-state spread of the conditional means covers both the inner
    // noise and any genuine dependence on the frozen state.
    est.pooled = floored(summarize(means), samples);
    est.pooled.n = n_outer * inner * per_draw;
    return est;
}

// sum over [from, to) of the penalty increments of `spec` along b.
double penalty_increment(const PenaltySpec& spec, const std::vector<double>& quad_delta,
                         const GeneratorSpec& g, const PathBundle& b, std::size_t from,
                         std::size_t to)
{
    const double dt = b.grid.dt();
    double sum = 0.0;
    const bool entropic = spec.kind() == PenaltySpec::Kind::Entropic;
    for (std::size_t k = from; k < to; ++k) {
        const auto eta = g.at(b.state(k), b.grid);
        const double sq = eta[0] * eta[0] + eta[1] * eta[1];
        if (entropic)
            sum += eta[0] * b.dW1[k] + eta[1] * b.dW2[k] - 0.5 * sq * dt;
        else
            sum += 0.5 * quad_delta[k] * sq * dt;
    }
    return entropic ? spec.entropic_delta() * sum : sum;
}

double log_density(const GeneratorSpec& g, const PathBundle& b, std::size_t from, std::size_t to)
{
    const double dt = b.grid.dt();
    double sum = 0.0;
    for (std::size_t k = from; k < to; ++k) {
        const auto eta = g.at(b.state(k), b.grid);
        sum += eta[0] * b.dW1[k] + eta[1] * b.dW2[k] - 0.5 * (eta[0] * eta[0] + eta[1] * eta[1]) * dt;
    }
    return sum;
}

std::vector<double> checked_penalty(const PenaltySpec& spec, const TimeGrid& grid, const char* who)
{
    switch (spec.kind()) {
    case PenaltySpec::Kind::Quadratic: {
        auto d = spec.delta_path().realize(grid);
        for (double v : d)
            if (v < 0.0)
                throw std::invalid_argument(std::string(who) + ": negative penalty delta");
        return d;
    }
    case PenaltySpec::Kind::Entropic:
        return {};
    default:
        throw std::invalid_argument(std::string(who) +
                                    ": penalty must be quadratic or entropic, got " +
                                    spec.describe().at("type").get<std::string>());
    }
}

Window make_window(const CriterionField& field, const GeneratorSpec* measure, double t, double T,
                   std::uint64_t seed, double S0)
{
    Window w{field.coeffs_ptr(), field.grid().index_of(t), field.grid().index_of(T), measure, seed, S0};
    if (w.ti > w.Ti)
        throw std::invalid_argument("requires t <= T");
    return w;
}

double start_log_wealth(const Window& w, const Strategy& s, const PathBundle* outer, double x0)
{
    if (outer == nullptr)
        return std::log(x0);
    return log_wealth_between(*outer, s, x0, 0, w.ti);
}

DriftReport to_report(const Estimate& e, double t, double T, const DriftOptions& opt)
{
    DriftReport r;
    r.t = t;
    r.T = T;
    r.estimate = e.pooled.mean;
    r.std_error = e.pooled.std_error;
    r.n_paths = e.pooled.n;
    r.verdict = classify(r.estimate, r.std_error);
    r.method = opt.reweight ? "reweight" : "shift";
    r.antithetic = opt.antithetic;
    r.per_state = e.per_state;
    return r;
}

}  // namespace

DriftReport drift_test(const CriterionField& field, const Strategy& strategy,
                       const GeneratorSpec& generator, const PenaltySpec& spec, double t, double T,
                       std::size_t n_paths, std::uint64_t seed, const DriftOptions& options)
{
    const auto quad_delta = checked_penalty(spec, field.grid(), "drift_test");
    Window w = make_window(field, options.reweight ? nullptr : &generator, t, T, seed, options.S0);
    if (options.reweight && w.ti != 0)
        throw std::invalid_argument("drift_test: reweighting is only available at t = 0");
    const double dA = field.drift(w.Ti) - field.drift(w.ti);

    auto est = run_window(w, n_paths, options, [&](const PathBundle& b, const PathBundle* outer) {
        const double lx0 = start_log_wealth(w, strategy, outer, options.x0);
        const double lxT = log_wealth_between(b, strategy, std::exp(lx0), w.ti, w.Ti);
        const double dN = lxT - lx0 + dA + penalty_increment(spec, quad_delta, generator, b, w.ti, w.Ti);
        if (!options.reweight)
            return dN;
        return std::exp(log_density(generator, b, w.ti, w.Ti)) * dN;
    });
    return to_report(est, t, T, options);
}

MeanStderr expected_log_growth(const CriterionField& field, const Strategy& strategy,
                               const GeneratorSpec& generator, double t, double T,
                               std::size_t n_paths, std::uint64_t seed, const DriftOptions& options)
{
    Window w = make_window(field, &generator, t, T, seed, options.S0);
    return run_window(w, n_paths, options, [&](const PathBundle& b, const PathBundle* outer) {
               const double lx0 = start_log_wealth(w, strategy, outer, options.x0);
               return log_wealth_between(b, strategy, std::exp(lx0), w.ti, w.Ti) - lx0;
           })
        .pooled;
}

MeanStderr log_growth_difference(const CriterionField& field, const Strategy& a, const Strategy& b,
                                 const GeneratorSpec& generator, double t, double T,
                                 std::size_t n_paths, std::uint64_t seed, const DriftOptions& options)
{
    Window w = make_window(field, &generator, t, T, seed, options.S0);
    return run_window(w, n_paths, options, [&](const PathBundle& p, const PathBundle* outer) {
               const double la = start_log_wealth(w, a, outer, options.x0);
               const double lb = start_log_wealth(w, b, outer, options.x0);
               return (log_wealth_between(p, a, std::exp(la), w.ti, w.Ti) - la) -
                      (log_wealth_between(p, b, std::exp(lb), w.ti, w.Ti) - lb);
           })
        .pooled;
}

// ---------------------------------------------------------------------------
// Self-generation scan

namespace {

// Least-squares quadratic through per-path values on `grid`; vertex CI by
// the delta method on the per-path coefficient samples.
VertexFit fit_vertex(const std::vector<double>& grid, const std::vector<std::vector<double>>& values)
{
    const std::size_t m = grid.size();
    VertexFit fit;
    // Normal equations (X'X) beta = X'v with X rows (1, r, r^2).
    std::array<std::array<double, 3>, 3> xtx{};
    for (double r : grid) {
        const double p[3] = {1.0, r, r * r};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                xtx[a][b] += p[a] * p[b];
    }
    const auto& M = xtx;
    const double det = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                       M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                       M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    if (m < 3 || std::abs(det) < 1e-14)
        throw std::invalid_argument("vertex fit needs at least 3 distinct grid points");
    std::array<std::array<double, 3>, 3> inv{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const int a1 = (b + 1) % 3, a2 = (b + 2) % 3, b1 = (a + 1) % 3, b2 = (a + 2) % 3;
            inv[a][b] = (M[a1][b1] * M[a2][b2] - M[a1][b2] * M[a2][b1]) / det;
        }
    // L = inv * X'  (3 x m)
    std::vector<std::array<double, 3>> L(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double p[3] = {1.0, grid[j], grid[j] * grid[j]};
        for (int a = 0; a < 3; ++a)
            L[j][a] = inv[a][0] * p[0] + inv[a][1] * p[1] + inv[a][2] * p[2];
    }
    const std::size_t n = values.front().size();
    std::vector<double> b1(n), b2(n);
    for (std::size_t i = 0; i < n; ++i) {
        double c1 = 0.0, c2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            c1 += L[j][1] * values[j][i];
            c2 += L[j][2] * values[j][i];
        }
        b1[i] = c1;
        b2[i] = c2;
    }
    const auto s1 = summarize(b1), s2 = summarize(b2);
    fit.curvature = s2.mean;
    fit.vertex = -s1.mean / (2.0 * s2.mean);
    double v11 = 0.0, v22 = 0.0, v12 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d1 = b1[i] - s1.mean, d2 = b2[i] - s2.mean;
        v11 += d1 * d1;
        v22 += d2 * d2;
        v12 += d1 * d2;
    }
    const double denom = static_cast<double>(n) * static_cast<double>(n - 1);
    v11 /= denom;
    v22 /= denom;
    v12 /= denom;
    const double g1 = -1.0 / (2.0 * s2.mean);
    const double g2 = s1.mean / (2.0 * s2.mean * s2.mean);
    const double var = g1 * g1 * v11 + 2.0 * g1 * g2 * v12 + g2 * g2 * v22;
    fit.half_width = std::max(kStderrMultiple * std::sqrt(std::max(var, 0.0)), kVertexFloor);
    fit.within = std::isfinite(fit.vertex) && std::abs(fit.vertex - 1.0) <= fit.half_width;
    return fit;
}

std::size_t index_of_one(const std::vector<double>& grid, const char* what)
{
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] == 1.0)
            return i;
    throw std::invalid_argument(std::string("self_generation_scan: ") + what + " must contain 1.0");
}

MeanStderr paired(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = a[i] - b[i];
    return floored(summarize(d), a);
}

}  // namespace

nlohmann::json SaddleReport::to_json() const
{
    auto cells = nlohmann::json::array();
    for (std::size_t i = 0; i < rho_grid.size(); ++i)
        for (std::size_t j = 0; j < c_grid.size(); ++j)
            cells.push_back({{"rho", rho_grid[i]},
                             {"c", c_grid[j]},
                             {"estimate", value[i][j].mean},
                             {"stderr", value[i][j].std_error}});
    auto cj = nlohmann::json::array();
    for (const auto& c : checks)
        cj.push_back({{"name", c.name}, {"pass", c.pass}, {"worst_margin", c.worst_margin}});
    auto fj = [](const VertexFit& f) {
        return nlohmann::json{{"vertex", f.vertex},
                              {"half_width", f.half_width},
                              {"curvature", f.curvature},
                              {"within", f.within}};
    };
    return {{"x", x},           {"t", t},         {"T", T},
            {"target", target}, {"cells", cells}, {"checks", cj},
            {"rho_fit", fj(rho_fit)}, {"c_fit", fj(c_fit)}, {"saddle", saddle}};
}

SaddleReport self_generation_scan(const CriterionField& field, double t, double T,
                                  const std::vector<double>& rho_grid,
                                  const std::vector<double>& c_grid, std::size_t n_paths,
                                  std::uint64_t seed, const ScanOptions& options)
{
    if (rho_grid.empty() || c_grid.empty())
        throw std::invalid_argument("self_generation_scan: empty perturbation grid");
    if (n_paths < 2)
        throw std::invalid_argument("self_generation_scan: need at least 2 paths");
    if (!(options.x > 0.0))
        throw std::invalid_argument("self_generation_scan: x must be positive");
    const std::size_t i1 = index_of_one(rho_grid, "rho grid");
    const std::size_t j1 = index_of_one(c_grid, "c grid");
    const std::size_t ti = field.grid().index_of(t), Ti = field.grid().index_of(T);
    if (ti > Ti)
        throw std::invalid_argument("self_generation_scan: requires t <= T");

    const auto eta_bar = GeneratorSpec::worst_case();
    std::vector<GeneratorSpec> measures;
    for (double c : c_grid)
        measures.push_back(eta_bar.scaled(c));
    std::vector<Strategy> strategies;
    for (double r : rho_grid)
        strategies.push_back(Strategy::scaled(Strategy::fractional_kelly(), r));

    const std::size_t nr = rho_grid.size(), nc = c_grid.size();
    // samples[i][j][path]
    std::vector<std::vector<std::vector<double>>> samples(
        nr, std::vector<std::vector<double>>(nc, std::vector<double>(n_paths)));
    const auto& delta = field.coeffs().delta;
    const double dt = field.grid().dt();
    const double AT = field.drift(Ti);
    const double lx = std::log(options.x);

    parallel_for(n_paths, options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            for (std::size_t j = 0; j < nc; ++j) {
                PathRequest req;
                req.substream = {seed, streams::kReference, p};
                req.start = ti;
                req.S_start = options.S0;
                req.measure = &measures[j];
                const PathBundle b = simulate_path(field.coeffs_ptr(), req);
                double pen = 0.0;
                for (std::size_t k = ti; k < Ti; ++k) {
                    const auto eta = measures[j].at(b.state(k), b.grid);
                    pen += 0.5 * delta[k] * (eta[0] * eta[0] + eta[1] * eta[1]) * dt;
                }
                for (std::size_t i = 0; i < nr; ++i)
                    samples[i][j][p] =
                        log_wealth_between(b, strategies[i], options.x, ti, Ti) + AT + pen;
            }
        }
    });

    SaddleReport r;
    r.x = options.x;
    r.t = t;
    r.T = T;
    r.rho_grid = rho_grid;
    r.c_grid = c_grid;
    r.target = lx + field.drift(ti);
    r.value.assign(nr, std::vector<MeanStderr>(nc));
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j)
            r.value[i][j] = floored(summarize(samples[i][j]), samples[i][j]);

    const auto& centre = samples[i1][j1];
    {
        const auto& v = r.value[i1][j1];
        const double margin = kStderrMultiple * v.std_error - std::abs(v.mean - r.target);
        r.checks.push_back({"value_at_saddle_equals_U", margin >= 0.0, margin});
    }
    {
        SaddleCheck chk{"min_over_measures", true, std::numeric_limits<double>::infinity()};
        for (std::size_t j = 0; j < nc; ++j) {
            if (j == j1)
                continue;
            const auto d = paired(samples[i1][j], centre);
            const double margin = d.mean + kStderrMultiple * d.std_error;
            chk.worst_margin = std::min(chk.worst_margin, margin);
            chk.pass = chk.pass && margin >= 0.0;
        }
        if (nc == 1)
            chk.worst_margin = 0.0;
        r.checks.push_back(chk);
    }
    {
        SaddleCheck chk{"max_over_strategies", true, std::numeric_limits<double>::infinity()};
        for (std::size_t i = 0; i < nr; ++i) {
            if (i == i1)
                continue;
            const auto d = paired(samples[i][j1], centre);
            const double margin = kStderrMultiple * d.std_error - d.mean;
            chk.worst_margin = std::min(chk.worst_margin, margin);
            chk.pass = chk.pass && margin >= 0.0;
        }
        if (nr == 1)
            chk.worst_margin = 0.0;
        r.checks.push_back(chk);
    }

    bool fits_ok = true;
    if (nr >= 3) {
        std::vector<std::vector<double>> col(nr);
        for (std::size_t i = 0; i < nr; ++i)
            col[i] = samples[i][j1];
        r.rho_fit = fit_vertex(rho_grid, col);
        fits_ok = fits_ok && r.rho_fit.within && r.rho_fit.curvature < 0.0;
    }
    if (nc >= 3) {
        r.c_fit = fit_vertex(c_grid, samples[i1]);
        fits_ok = fits_ok && r.c_fit.within && r.c_fit.curvature > 0.0;
    }
    r.saddle = fits_ok && std::all_of(r.checks.begin(), r.checks.end(),
                                      [](const SaddleCheck& c) { return c.pass; });
    return r;
}

void write_surface_csv(std::ostream& out, const SaddleReport& report)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "rho,c,estimate,stderr\n";
    for (std::size_t i = 0; i < report.rho_grid.size(); ++i)
        for (std::size_t j = 0; j < report.c_grid.size(); ++j)
            out << report.rho_grid[i] << ',' << report.c_grid[j] << ',' << report.value[i][j].mean
                << ',' << report.value[i][j].std_error << '\n';
    out.precision(old);
}

// ---------------------------------------------------------------------------
// Dual submartingale test

DriftReport dual_submartingale_test(const CriterionField& field, const CoefficientPath& nu,
                                    const GeneratorSpec& generator, const PenaltySpec& spec,
                                    double y, double t, double T, std::size_t n_paths,
                                    std::uint64_t seed, const DriftOptions& options)
{
    if (!(y > 0.0))
        throw std::invalid_argument("dual_submartingale_test: y must be positive");
    const auto quad_delta = checked_penalty(spec, field.grid(), "dual_submartingale_test");
    const auto nu_path = nu.realize(field.grid());
    Window w = make_window(field, &generator, t, T, seed, options.S0);
    const auto& lam = field.coeffs().lambda_hat;
    const double dt = field.grid().dt();
    const double v0 = field.dual(y, w.ti);

    DriftOptions opt = options;
    opt.reweight = false;
    auto est = run_window(w, n_paths, opt, [&](const PathBundle& b, const PathBundle*) {
        double log_z = 0.0;
        for (std::size_t k = w.ti; k < w.Ti; ++k)
            log_z += -lam[k] * b.dW1[k] - nu_path[k] * b.dW2[k] -
                     0.5 * (lam[k] * lam[k] + nu_path[k] * nu_path[k]) * dt;
        const double log_d = log_density(generator, b, w.ti, w.Ti);
        return field.dual(y * std::exp(log_z - log_d), w.Ti) +
               penalty_increment(spec, quad_delta, generator, b, w.ti, w.Ti) - v0;
    });
    DriftReport r = to_report(est, t, T, opt);
    r.equality_case = nu.is_constant() && nu.constant_value() == 0.0 && generator.is_worst_case() &&
                      generator.scale() == 1.0;
    return r;
}

}  // namespace rfc
