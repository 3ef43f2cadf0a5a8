#include "rfc/oracle/node_problems.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rfc::oracle {

SimplexArgmin simplex_minimize(std::size_t K, const std::function<double(const std::vector<double>&)>& f,
                               double tol)
{
    switch (K) {
    case 1:
        return {{1.0}, f({1.0})};
    case 2: {
        const auto m = golden_minimize([&](double a) { return f({a, 1.0 - a}); }, 0.0, 1.0, tol);
        return {{m.x, 1.0 - m.x}, m.f};
    }
    case 3: {
        auto inner = [&](double a) {
            const double rest = 1.0 - a;
            return golden_minimize([&](double b) { return f({a, b, std::max(0.0, rest - b)}); }, 0.0,
                                   rest, tol);
        };
        const auto outer = golden_minimize([&](double a) { return inner(a).f; }, 0.0, 1.0, tol);
        const auto in = inner(outer.x);
        return {{outer.x, in.x, std::max(0.0, 1.0 - outer.x - in.x)}, in.f};
    }
    default:
        throw std::invalid_argument("simplex_minimize: supports at most 3 kernels, got " +
                                    std::to_string(K));
    }
}

EmmSet::EmmSet(const std::vector<double>& r)
{
    const std::size_t b = r.size();
    if (b < 2 || b > 3)
        throw std::invalid_argument("EMM sweep supports 2 or 3 branches, got " + std::to_string(b));
    auto add = [&](std::vector<double> m) {
        for (const auto& v : vertices_) {
            bool same = true;
            for (std::size_t i = 0; i < b; ++i)
                same = same && std::abs(v[i] - m[i]) < 1e-15;
            if (same)
                return;
        }
        vertices_.push_back(std::move(m));
    };
    for (std::size_t i = 0; i < b; ++i) {
        if (r[i] == 0.0) {
            std::vector<double> m(b, 0.0);
            m[i] = 1.0;
            add(m);
            continue;
        }
        for (std::size_t j = 0; j < b; ++j) {
            if (!(r[i] < 0.0 && r[j] > 0.0))
                continue;
            std::vector<double> m(b, 0.0);
            m[i] = r[j] / (r[j] - r[i]);
            m[j] = -r[i] / (r[j] - r[i]);
            add(m);
        }
    }
    if (vertices_.empty())
        throw std::invalid_argument("EMM set empty: arbitrage");
    if (b == 2 && vertices_.size() != 1)
        throw std::logic_error("EMM set: two branches must give one martingale kernel");
    if (b == 3 && vertices_.size() != 2)
        throw std::logic_error("EMM set: three branches must give a segment");
}

std::vector<double> EmmSet::at(double s) const
{
    if (unique())
        return vertices_.front();
    std::vector<double> m(vertices_[0].size());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = (1.0 - s) * vertices_[0][i] + s * vertices_[1][i];
    return m;
}

std::vector<double> mix_kernels(const std::vector<Kernel>& kernels, const std::vector<double>& w,
                                double* penalty)
{
    std::vector<double> q(kernels.front().q.size(), 0.0);
    double g = 0.0;
    for (std::size_t j = 0; j < kernels.size(); ++j) {
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] += w[j] * kernels[j].q[i];
        g += w[j] * kernels[j].penalty;
    }
    if (penalty != nullptr)
        *penalty = g;
    return q;
}

double relative_entropy(const std::vector<double>& q, const std::vector<double>& p)
{
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        s += q[i] * std::log(q[i] / p[i]);
    return s;
}

// ---------------------------------------------------------------------------

namespace {

std::pair<double, double> fraction_interval(const Period& period)
{
    const auto [lo, hi] = feasible_amounts(1.0, period.returns);
    const double shrink = 1e-12 * (hi - lo);
    return {lo + shrink, hi - shrink};
}

std::vector<double> payoff(const Period& period, double theta, const std::vector<double>& c)
{
    std::vector<double> y(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double g = 1.0 + theta * period.returns[i];
        y[i] = (g > 0.0 ? std::log(g) : -std::numeric_limits<double>::infinity()) + c[i];
    }
    return y;
}

double expect(const std::vector<double>& q, const std::vector<double>& y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        s += q[i] * y[i];
    return s;
}

double slope(const Period& period, double theta, const std::vector<double>& q)
{
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        s += q[i] * period.returns[i] / (1.0 + theta * period.returns[i]);
    return s;
}

// Maximizer of a strictly concave function on (lo, hi) given its right
// derivative, by bisection down to adjacent doubles.
template <typename Slope>
double concave_argmax(Slope right_slope, double lo, double hi)
{
    if (right_slope(lo) <= 0.0)
        return lo;
    if (right_slope(hi) >= 0.0)
        return hi;
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (right_slope(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void check_children(const Period& period, const std::vector<double>& c)
{
    if (c.size() != period.returns.size())
        throw std::invalid_argument("node problem: one continuation value per branch required");
}

}  // namespace

LogNode log_node_kernels(const Period& period, const std::vector<Kernel>& kernels,
                         const std::vector<double>& c)
{
    check_children(period, c);
    if (kernels.empty())
        throw std::invalid_argument("node problem: empty kernel set");
    auto objective = [&](double theta) {
        const auto y = payoff(period, theta, c);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& k : kernels)
            best = std::min(best, expect(k.q, y) + k.penalty);
        return best;
    };
    // right derivative of the lower envelope: smallest slope among the minimizers
    auto right_slope = [&](double theta) {
        const auto y = payoff(period, theta, c);
        double best = std::numeric_limits<double>::infinity(), d = 0.0;
        for (const auto& k : kernels) {
            const double v = expect(k.q, y) + k.penalty;
            const double sk = slope(period, theta, k.q);
            if (v < best || (v == best && sk < d)) {
                best = v;
                d = sk;
            }
        }
        return d;
    };
    const auto [lo, hi] = fraction_interval(period);
    const double theta = concave_argmax(right_slope, lo, hi);
    const Argmin opt{theta, objective(theta)};

    LogNode out;
    out.c = opt.f;
    out.theta = opt.x;
    out.weights.assign(kernels.size(), 0.0);

    // Saddle kernel: among the kernels active at theta*, a single one with
    // zero slope, or the mixture of two opposite-slope ones whose slope
    // vanishes.
    const auto y = payoff(period, opt.x, c);
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < kernels.size(); ++j)
        if (expect(kernels[j].q, y) + kernels[j].penalty <= opt.f + 1e-8 * (1.0 + std::abs(opt.f)))
            active.push_back(j);
    std::size_t flat = active.front();
    double flat_slope = std::abs(slope(period, opt.x, kernels[flat].q));
    for (std::size_t j : active)
        if (const double s = std::abs(slope(period, opt.x, kernels[j].q)); s < flat_slope) {
            flat = j;
            flat_slope = s;
        }
    bool mixed = false;
    if (flat_slope > 1e-6) {
        for (std::size_t a : active) {
            for (std::size_t b : active) {
                const double da = slope(period, opt.x, kernels[a].q);
                const double db = slope(period, opt.x, kernels[b].q);
                if (da > 0.0 && db < 0.0) {
                    const double w = -db / (da - db);
                    out.weights[a] = w;
                    out.weights[b] = 1.0 - w;
                    mixed = true;
                    break;
                }
            }
            if (mixed)
                break;
        }
    }
    if (!mixed)
        out.weights[flat] = 1.0;
    out.worst_q = mix_kernels(kernels, out.weights, &out.worst_penalty);
    return out;
}

namespace {

// -delta ln sum_i p_i exp(-y_i / delta), evaluated stably.
double certainty_equivalent(const std::vector<double>& p, const std::vector<double>& y, double delta)
{
    double ymin = std::numeric_limits<double>::infinity();
    for (double v : y)
        ymin = std::min(ymin, v);
    if (!std::isfinite(ymin))
        return ymin;
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        s += p[i] * std::exp(-(y[i] - ymin) / delta);
    return ymin - delta * std::log(s);
}

}  // namespace

LogNode log_node_entropic(const Period& period, double delta, const std::vector<double>& c)
{
    check_children(period, c);
    auto objective = [&](double theta) {
        return certainty_equivalent(period.p, payoff(period, theta, c), delta);
    };
    auto tilt = [&](double theta) {
        const auto y = payoff(period, theta, c);
        const double ymin = *std::min_element(y.begin(), y.end());
        std::vector<double> q(y.size());
        double z = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            z += q[i] = period.p[i] * std::exp(-(y[i] - ymin) / delta);
        for (double& v : q)
            v /= z;
        return q;
    };
    const auto [lo, hi] = fraction_interval(period);
    const double theta = concave_argmax([&](double th) { return slope(period, th, tilt(th)); }, lo, hi);
    LogNode out;
    out.c = objective(theta);
    out.theta = theta;
    const auto q = tilt(theta);
    out.worst_q = q;
    out.worst_penalty = delta * relative_entropy(q, period.p);
    return out;
}

LogNode log_node_fixed(const Period& period, const std::vector<double>& q, const std::vector<double>& c)
{
    check_children(period, c);
    const auto [lo, hi] = fraction_interval(period);
    const double theta = concave_argmax([&](double th) { return slope(period, th, q); }, lo, hi);
    return {expect(q, payoff(period, theta, c)), theta, q, {1.0}, 0.0};
}

// ---------------------------------------------------------------------------

namespace {

template <typename Inner>
DualNode sweep_emm(const EmmSet& emm, const DualSweep& sweep, Inner inner)
{
    if (emm.unique()) {
        auto r = inner(emm.at(0.0));
        r.s = 0.0;
        return r;
    }
    if (sweep.points < 1)
        throw std::invalid_argument("dual sweep needs at least one point");
    const double n = static_cast<double>(sweep.points);
    std::size_t best_j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sweep.points; ++j) {
        const double s = (static_cast<double>(j) + 0.5) / n;
        if (const double v = inner(emm.at(s)).D; v < best) {
            best = v;
            best_j = j;
        }
    }
    double s_best = (static_cast<double>(best_j) + 0.5) / n;
    if (sweep.refine) {
        const double lo = std::max(0.0, s_best - 1.0 / n), hi = std::min(1.0, s_best + 1.0 / n);
        const auto m = golden_minimize([&](double s) { return inner(emm.at(s)).D; }, lo, hi, 1e-13);
        if (m.f < best)
            s_best = m.x;
    }
    auto r = inner(emm.at(s_best));
    r.s = s_best;
    return r;
}

double kl_plus(const std::vector<double>& q, const std::vector<double>& m, const std::vector<double>& D)
{
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (m[i] <= 0.0)
            return std::numeric_limits<double>::infinity();
        s += q[i] * (std::log(q[i] / m[i]) + D[i]);
    }
    return s;
}

}  // namespace

DualNode log_dual_kernels(const Period& period, const std::vector<Kernel>& kernels,
                          const std::vector<double>& D, const DualSweep& sweep)
{
    check_children(period, D);
    const EmmSet emm(period.returns);
    return sweep_emm(emm, sweep, [&](const std::vector<double>& m) {
        const auto best = simplex_minimize(kernels.size(), [&](const std::vector<double>& w) {
            double g = 0.0;
            const auto q = mix_kernels(kernels, w, &g);
            return kl_plus(q, m, D) + g;
        });
        DualNode r;
        r.D = best.f;
        r.weights = best.w;
        r.q = mix_kernels(kernels, best.w);
        r.m = m;
        return r;
    });
}

DualNode log_dual_entropic(const Period& period, double delta, const std::vector<double>& D,
                           const DualSweep& sweep)
{
    check_children(period, D);
    const EmmSet emm(period.returns);
    return sweep_emm(emm, sweep, [&](const std::vector<double>& m) {
        // min_q sum q_i ((1 + delta) ln q_i - (ln m_i + delta ln p_i - D_i))
        //   = -(1 + delta) ln sum_i exp((ln m_i + delta ln p_i - D_i) / (1 + delta)).
        const std::size_t b = m.size();
        std::vector<double> a(b);
        double amax = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < b; ++i) {
            a[i] = m[i] > 0.0 ? (std::log(m[i]) + delta * std::log(period.p[i]) - D[i]) / (1.0 + delta)
                              : -std::numeric_limits<double>::infinity();
            amax = std::max(amax, a[i]);
        }
        double z = 0.0;
        std::vector<double> q(b);
        for (std::size_t i = 0; i < b; ++i)
            z += q[i] = std::exp(a[i] - amax);
        for (double& v : q)
            v /= z;
        DualNode r;
        r.D = -(1.0 + delta) * (amax + std::log(z));
        r.q = q;
        r.m = m;
        return r;
    });
}

}  // namespace rfc::oracle
