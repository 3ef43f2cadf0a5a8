#include "rfc/dualpde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rfc/parallel.hpp"

namespace rfc {

PenaltyIntegrand PenaltyIntegrand::quadratic(double delta)
{
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("quadratic integrand: delta must be finite and >= 0");
    PenaltyIntegrand g;
    g.repr_ = Quadratic{delta};
    return g;
}

PenaltyIntegrand PenaltyIntegrand::quadratic_capped(double delta, double cap)
{
    if (!(delta >= 0.0) || !std::isfinite(delta) || !(cap > 0.0) || !std::isfinite(cap))
        throw std::invalid_argument("capped integrand: need delta >= 0 and cap > 0");
    PenaltyIntegrand g;
    g.repr_ = Capped{delta, cap};
    return g;
}

PenaltyIntegrand PenaltyIntegrand::tabulated(std::vector<double> eta1, std::vector<double> eta2,
                                             std::vector<double> values)
{
    if (eta1.empty() || eta2.empty() || values.size() != eta1.size() * eta2.size())
        throw std::invalid_argument("tabulated integrand: values must have eta1.size() * eta2.size() entries");
    if (std::none_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }))
        throw std::invalid_argument("tabulated integrand: no finite entry");
    PenaltyIntegrand g;
    g.repr_ = Tabulated{std::move(eta1), std::move(eta2), std::move(values)};
    return g;
}

PenaltyIntegrand PenaltyIntegrand::zero_only() { return PenaltyIntegrand{}; }

std::optional<double> PenaltyIntegrand::value(std::array<double, 2> eta) const
{
    const double sq = eta[0] * eta[0] + eta[1] * eta[1];
    if (const auto* q = std::get_if<Quadratic>(&repr_))
        return 0.5 * q->delta * sq;
    if (const auto* c = std::get_if<Capped>(&repr_)) {
        if (sq > c->cap * c->cap)
            return std::nullopt;
        return 0.5 * c->delta * sq;
    }
    if (const auto* t = std::get_if<Tabulated>(&repr_)) {
        for (std::size_t i = 0; i < t->eta1.size(); ++i) {
            if (t->eta1[i] != eta[0])
                continue;
            for (std::size_t j = 0; j < t->eta2.size(); ++j)
                if (t->eta2[j] == eta[1] && std::isfinite(t->values[i * t->eta2.size() + j]))
                    return t->values[i * t->eta2.size() + j];
        }
        return std::nullopt;
    }
    if (sq == 0.0)
        return 0.0;
    return std::nullopt;
}

nlohmann::json PenaltyIntegrand::describe() const
{
    if (const auto* q = std::get_if<Quadratic>(&repr_))
        return {{"type", "quadratic"}, {"delta", q->delta}};
    if (const auto* c = std::get_if<Capped>(&repr_))
        return {{"type", "quadratic_capped"}, {"delta", c->delta}, {"cap", c->cap}};
    if (const auto* t = std::get_if<Tabulated>(&repr_)) {
        auto vals = nlohmann::json::array();
        for (double v : t->values)
            vals.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
        return {{"type", "tabulated"}, {"eta1", t->eta1}, {"eta2", t->eta2}, {"values", vals}};
    }
    return {{"type", "zero_only"}};
}

PenaltyIntegrand PenaltyIntegrand::from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw std::invalid_argument("penalty: expected an object with a string \"type\"");
    const auto type = j.at("type").get<std::string>();
    auto allow = [&](std::initializer_list<const char*> keys) {
        for (const auto& [key, _] : j.items()) {
            bool ok = key == "type";
            for (const char* k : keys)
                ok = ok || key == k;
            if (!ok)
                throw std::invalid_argument("penalty." + key + ": unknown key");
        }
    };
    if (type == "quadratic") {
        allow({"delta"});
        return quadratic(j.at("delta").get<double>());
    }
    if (type == "quadratic_capped") {
        allow({"delta", "cap"});
        return quadratic_capped(j.at("delta").get<double>(), j.at("cap").get<double>());
    }
    if (type == "tabulated") {
        allow({"eta1", "eta2", "values"});
        std::vector<double> vals;
        for (const auto& v : j.at("values"))
            vals.push_back(v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
        return tabulated(j.at("eta1").get<std::vector<double>>(),
                         j.at("eta2").get<std::vector<double>>(), std::move(vals));
    }
    if (type == "zero_only") {
        allow({});
        return zero_only();
    }
    throw std::invalid_argument("penalty.type: unknown integrand type \"" + type + "\"");
}

// ---------------------------------------------------------------------------

namespace {

struct Point {
    double x;
    double f;
};

template <typename F>
Point golden_min(F f, double lo, double hi, double tol)
{
    if (hi <= lo)
        return {lo, f(lo)};
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 300 && (b - a) > tol; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    Point best{c, fc};
    if (fd < best.f)
        best = {d, fd};
    // The endpoints matter when the minimum sits on the boundary.
    for (double e : {lo, hi}) {
        const double fe = f(e);
        if (fe < best.f)
            best = {e, fe};
    }
    return best;
}

struct Smooth {
    double delta;
    double cap;  // infinity for the unconstrained quadratic
};

// Nested golden section on {|eta| <= cap} intersected with [-R, R]^2.
HamiltonianMin nested_golden(const Smooth& s, double kappa, double lam, std::array<double, 2> a,
                             double R)
{
    auto objective = [&](double e1, double e2) {
        const double u = e1 + lam;
        return 0.5 * s.delta * (e1 * e1 + e2 * e2) + 0.5 * kappa * u * u + a[0] * e1 + a[1] * e2;
    };
    const double tol = 1e-11 * R;
    const double r1 = std::min(R, s.cap);
    auto inner = [&](double e1) {
        const double span = std::isfinite(s.cap) ? std::sqrt(std::max(0.0, s.cap * s.cap - e1 * e1)) : R;
        const double hw = std::min(R, span);
        return golden_min([&](double e2) { return objective(e1, e2); }, -hw, hw, tol);
    };
    const Point outer = golden_min([&](double e1) { return inner(e1).f; }, -r1, r1, tol);
    const Point in = inner(outer.x);
    return {false, in.f, {outer.x, in.x}};
}

}  // namespace

HamiltonianMin minimize_hamiltonian(const PenaltyIntegrand& g, double kappa, double lam,
                                    std::array<double, 2> a)
{
    if (!std::isfinite(kappa) || !std::isfinite(lam) || !std::isfinite(a[0]) || !std::isfinite(a[1]))
        throw std::invalid_argument("hamiltonian: non-finite input");
    const auto& repr = g.repr();
    if (const auto* t = std::get_if<PenaltyIntegrand::Tabulated>(&repr)) {
        HamiltonianMin best{false, std::numeric_limits<double>::infinity(), {0.0, 0.0}};
        for (std::size_t i = 0; i < t->eta1.size(); ++i)
            for (std::size_t j = 0; j < t->eta2.size(); ++j) {
                const double gv = t->values[i * t->eta2.size() + j];
                if (!std::isfinite(gv))
                    continue;
                const double e1 = t->eta1[i], e2 = t->eta2[j];
                const double v = gv + 0.5 * kappa * (e1 + lam) * (e1 + lam) + a[0] * e1 + a[1] * e2;
                if (v < best.value)
                    best = {false, v, {e1, e2}};
            }
        return best;
    }
    if (std::holds_alternative<PenaltyIntegrand::ZeroOnly>(repr))
        return {false, 0.5 * kappa * lam * lam, {0.0, 0.0}};

    Smooth s{0.0, std::numeric_limits<double>::infinity()};
    if (const auto* q = std::get_if<PenaltyIntegrand::Quadratic>(&repr)) {
        s.delta = q->delta;
        // Coercivity of the quadratic objective in each coordinate.
        const double c1 = s.delta + kappa, l1 = kappa * lam + a[0];
        if (c1 < 0.0 || (c1 == 0.0 && l1 != 0.0) || (s.delta == 0.0 && a[1] != 0.0))
            return {true, -std::numeric_limits<double>::infinity(), {0.0, 0.0}};
    } else {
        const auto& c = std::get<PenaltyIntegrand::Capped>(repr);
        s = {c.delta, c.cap};
    }

    double R = 10.0 * (1.0 + std::abs(lam) + std::abs(a[0]) + std::abs(a[1]));
    if (std::isfinite(s.cap))
        return nested_golden(s, kappa, lam, a, std::max(R, s.cap));
    for (int grow = 0; grow < 12; ++grow, R *= 10.0) {
        const auto m = nested_golden(s, kappa, lam, a, R);
        const double edge = R * (1.0 - 1e-6);
        if (std::abs(m.minimizer[0]) < edge && std::abs(m.minimizer[1]) < edge)
            return m;
    }
    return {true, -std::numeric_limits<double>::infinity(), {0.0, 0.0}};
}

nlohmann::json DriftResult::to_json() const
{
    nlohmann::json j{{"method", method}, {"exploratory", exploratory}, {"unbounded", unbounded}};
    if (unbounded) {
        j["b"] = nullptr;
        j["minimizer"] = nullptr;
    } else {
        j["b"] = b;
        j["minimizer"] = {minimizer[0], minimizer[1]};
    }
    return j;
}

DriftResult drift_from_relation(const PenaltyIntegrand& g, std::array<double, 2> a, double lambda_hat)
{
    const auto m = minimize_hamiltonian(g, 1.0, lambda_hat, a);
    DriftResult r;
    r.unbounded = m.unbounded;
    r.b = m.unbounded ? 0.0 : -m.value;
    r.minimizer = m.minimizer;
    r.method = std::holds_alternative<PenaltyIntegrand::Tabulated>(g.repr()) ? "enumeration"
                                                                            : "nested_golden";
    r.exploratory = a[0] != 0.0 || a[1] != 0.0;
    return r;
}

DriftResult drift_dense_grid(const PenaltyIntegrand& g, std::array<double, 2> a, double lam,
                             double half_width, double step, int threads)
{
    if (!(half_width > 0.0) || !(step > 0.0))
        throw std::invalid_argument("drift_dense_grid: need positive half width and step");
    const auto n = static_cast<std::size_t>(std::llround(2.0 * half_width / step));
    const auto& repr = g.repr();
    const auto* q = std::get_if<PenaltyIntegrand::Quadratic>(&repr);
    const auto* c = std::get_if<PenaltyIntegrand::Capped>(&repr);

    struct Best {
        double v = std::numeric_limits<double>::infinity();
        double e1 = 0.0, e2 = 0.0;
    };
    std::vector<Best> rows(n + 1);
    auto node = [&](std::size_t i) { return -half_width + static_cast<double>(i) * step; };
    parallel_for(n + 1, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double e1 = node(i);
            const double u = e1 + lam;
            Best best;
            if (q != nullptr || c != nullptr) {
                const double d = q != nullptr ? q->delta : c->delta;
                const double cap2 = c != nullptr ? c->cap * c->cap : std::numeric_limits<double>::infinity();
                const double row = 0.5 * d * e1 * e1 + 0.5 * u * u + a[0] * e1;
                for (std::size_t j = 0; j <= n; ++j) {
                    const double e2 = node(j);
                    if (e1 * e1 + e2 * e2 > cap2)
                        continue;
                    const double v = row + 0.5 * d * e2 * e2 + a[1] * e2;
                    if (v < best.v)
                        best = {v, e1, e2};
                }
            } else {
                for (std::size_t j = 0; j <= n; ++j) {
                    const double e2 = node(j);
                    if (const auto gv = g.value({e1, e2}))
                        if (const double v = *gv + 0.5 * u * u + a[0] * e1 + a[1] * e2; v < best.v)
                            best = {v, e1, e2};
                }
            }
            rows[i] = best;
        }
    });
    Best best;
    for (const auto& r : rows)
        if (r.v < best.v)
            best = r;
    // Points of a finite support need not fall on the lattice.
    if (const auto* t = std::get_if<PenaltyIntegrand::Tabulated>(&repr)) {
        for (std::size_t i = 0; i < t->eta1.size(); ++i)
            for (std::size_t j = 0; j < t->eta2.size(); ++j) {
                const double gv = t->values[i * t->eta2.size() + j];
                const double e1 = t->eta1[i], e2 = t->eta2[j];
                if (!std::isfinite(gv) || std::abs(e1) > half_width || std::abs(e2) > half_width)
                    continue;
                const double v = gv + 0.5 * (e1 + lam) * (e1 + lam) + a[0] * e1 + a[1] * e2;
                if (v < best.v)
                    best = {v, e1, e2};
            }
    }
    if (std::holds_alternative<PenaltyIntegrand::ZeroOnly>(repr)) {
        const double v = 0.5 * lam * lam;
        if (v < best.v)
            best = {v, 0.0, 0.0};
    }
    if (!std::isfinite(best.v))
        throw std::invalid_argument("drift_dense_grid: no admissible point in the search square");
    DriftResult r;
    r.b = -best.v;
    r.minimizer = {best.e1, best.e2};
    r.method = "dense_grid";
    r.exploratory = a[0] != 0.0 || a[1] != 0.0;
    return r;
}

// ---------------------------------------------------------------------------

DualFieldSample sample_log_dual(double y_min, double y_max, std::size_t n_y,
                                const std::vector<double>& times, const std::vector<double>& A)
{
    if (!(y_min > 0.0) || !(y_max > y_min) || n_y < 2)
        throw std::invalid_argument("sample_log_dual: need 0 < y_min < y_max and n_y >= 2");
    if (A.size() != times.size())
        throw std::invalid_argument("sample_log_dual: A must have one value per time");
    DualFieldSample s;
    const double l0 = std::log(y_min), h = (std::log(y_max) - l0) / static_cast<double>(n_y - 1);
    for (std::size_t j = 0; j < n_y; ++j)
        s.y.push_back(j + 1 == n_y ? y_max : std::exp(l0 + static_cast<double>(j) * h));
    s.t = times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<double> row(n_y);
        for (std::size_t j = 0; j < n_y; ++j)
            row[j] = -std::log(s.y[j]) - 1.0 + A[k];
        s.V.push_back(std::move(row));
    }
    return s;
}

nlohmann::json HjbResidual::to_json() const
{
    return {{"max_abs", max_abs},
            {"arg_y", arg_y},
            {"arg_t", arg_t},
            {"rounding_bound", rounding_bound},
            {"h_log_y", h_log_y},
            {"dt", dt}};
}

HjbResidual hjb_residual(const DualFieldSample& V, const PenaltyIntegrand& g,
                         const std::vector<double>& lambda_hat, int threads)
{
    const std::size_t ny = V.y.size(), nt = V.t.size();
    if (ny < 3 || nt < 3)
        throw std::invalid_argument("hjb_residual: grid too coarse, need at least 3 points in y and t");
    if (V.V.size() != nt || lambda_hat.size() != nt)
        throw std::invalid_argument("hjb_residual: V and lambda_hat need one row per time node");
    for (const auto& row : V.V)
        if (row.size() != ny)
            throw std::invalid_argument("hjb_residual: V row length differs from the y grid");
    for (double y : V.y)
        if (!(y > 0.0))
            throw std::invalid_argument("hjb_residual: y grid must be strictly positive");

    HjbResidual r;
    r.h_log_y = std::log(V.y[1] / V.y[0]);
    r.dt = V.t[1] - V.t[0];
    for (std::size_t j = 1; j + 1 < ny; ++j)
        if (std::abs(std::log(V.y[j + 1] / V.y[j]) - r.h_log_y) > 1e-9 * r.h_log_y)
            throw std::invalid_argument("hjb_residual: y grid must be log-spaced");
    for (std::size_t k = 1; k + 1 < nt; ++k)
        if (std::abs((V.t[k + 1] - V.t[k]) - r.dt) > 1e-9 * r.dt)
            throw std::invalid_argument("hjb_residual: time grid must be uniform");
    if (!(r.h_log_y > 0.0) || !(r.dt > 0.0))
        throw std::invalid_argument("hjb_residual: grids must be increasing");

    double vmax = 0.0;
    for (const auto& row : V.V)
        for (double v : row)
            vmax = std::max(vmax, std::abs(v));
    const double h = r.h_log_y;
    r.rounding_bound = 4.0 * std::numeric_limits<double>::epsilon() * vmax / (h * h);

    r.residual.assign(nt, std::vector<double>(ny, 0.0));
    std::vector<std::size_t> bad(nt, 0);
    parallel_for(nt - 2, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t kk = begin; kk < end; ++kk) {
            const std::size_t k = kk + 1;
            for (std::size_t j = 1; j + 1 < ny; ++j) {
                const auto& row = V.V[k];
                // y^2 V_yy = V_zz - V_z in z = ln y.
                const double vz = (row[j + 1] - row[j - 1]) / (2.0 * h);
                const double vzz = (row[j + 1] - 2.0 * row[j] + row[j - 1]) / (h * h);
                const double vt = (V.V[k + 1][j] - V.V[k - 1][j]) / (2.0 * r.dt);
                const auto m = minimize_hamiltonian(g, vzz - vz, lambda_hat[k]);
                if (m.unbounded) {
                    bad[k] = j + 1;
                    continue;
                }
                r.residual[k][j] = vt + m.value;
            }
        }
    });
    for (std::size_t k = 0; k < nt; ++k)
        if (bad[k] != 0)
            throw std::invalid_argument("hjb_residual: unbounded infimum at node (y=" +
                                        std::to_string(V.y[bad[k] - 1]) +
                                        ", t=" + std::to_string(V.t[k]) + ")");
    for (std::size_t k = 1; k + 1 < nt; ++k)
        for (std::size_t j = 1; j + 1 < ny; ++j)
            if (std::abs(r.residual[k][j]) > r.max_abs) {
                r.max_abs = std::abs(r.residual[k][j]);
                r.arg_y = j;
                r.arg_t = k;
            }
    return r;
}

void write_residual_csv(std::ostream& out, const DualFieldSample& V, const HjbResidual& r)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "y,t,residual\n";
    for (std::size_t k = 1; k + 1 < V.t.size(); ++k)
        for (std::size_t j = 1; j + 1 < V.y.size(); ++j)
            out << V.y[j] << ',' << V.t[k] << ',' << r.residual[k][j] << '\n';
    out.precision(old);
}

}  // namespace rfc
