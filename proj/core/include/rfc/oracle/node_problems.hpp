#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "rfc/oracle/family.hpp"
#include "rfc/oracle/tree.hpp"

namespace rfc::oracle {

/// Default argument tolerance of every golden-section search.
inline constexpr double kGoldenTol = 1e-10;

struct Argmin {
    double x = 0.0;
    double f = 0.0;
};

/// Golden-section minimum of a unimodal f on [lo, hi]; endpoints are
/// compared too so boundary minima are found.
template <typename F>
Argmin golden_minimize(F&& f, double lo, double hi, double tol = kGoldenTol)
{
    if (!(hi > lo))
        return {lo, f(lo)};
    const double r = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 400 && (b - a) > tol; ++it) {
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
    Argmin best = fc <= fd ? Argmin{c, fc} : Argmin{d, fd};
    for (double e : {lo, hi})
        if (const double fe = f(e); fe < best.f)
            best = {e, fe};
    return best;
}

template <typename F>
Argmin golden_maximize(F&& f, double lo, double hi, double tol = kGoldenTol)
{
    auto m = golden_minimize([&](double x) { return -f(x); }, lo, hi, tol);
    return {m.x, -m.f};
}

struct SimplexArgmin {
    std::vector<double> w;
    double f = 0.0;
};

/// Minimum of a convex f over the probability simplex of dimension K <= 3,
/// by nested golden sections.
SimplexArgmin simplex_minimize(std::size_t K, const std::function<double(const std::vector<double>&)>& f,
                               double tol = kGoldenTol);

/// Equivalent martingale kernels of one period: a single point for two
/// branches, an open segment m(s) = (1 - s) m0 + s m1, s in (0, 1), for three.
class EmmSet {
public:
    explicit EmmSet(const std::vector<double>& returns);

    bool unique() const noexcept { return vertices_.size() == 1; }
    std::vector<double> at(double s) const;
    const std::vector<std::vector<double>>& vertices() const noexcept { return vertices_; }

private:
    std::vector<std::vector<double>> vertices_;
};

/// Outcome of a log-utility node problem: u(x) = ln x + c at this node.
struct LogNode {
    double c = 0.0;
    double theta = 0.0;              ///< optimal fraction of wealth invested
    std::vector<double> worst_q;     ///< saddle kernel
    std::vector<double> weights;     ///< mixture weights over the kernel list
    double worst_penalty = 0.0;      ///< one-step penalty of worst_q
};

/// max_theta min_k sum_i q_k,i (ln(1 + theta r_i) + c_i) + g_k.
LogNode log_node_kernels(const Period& period, const std::vector<Kernel>& kernels,
                         const std::vector<double>& child_c);
/// max_theta -delta ln sum_i p_i exp(-(ln(1 + theta r_i) + c_i) / delta).
LogNode log_node_entropic(const Period& period, double delta, const std::vector<double>& child_c);
/// max_theta sum_i q_i (ln(1 + theta r_i) + c_i).
LogNode log_node_fixed(const Period& period, const std::vector<double>& q,
                       const std::vector<double>& child_c);

struct DualSweep {
    std::size_t points = 400;  ///< uniform sweep over the EMM segment
    bool refine = true;        ///< golden refinement around the best sweep point
};

/// Dual node problem for log utility: the minimum over family kernels q and
/// martingale kernels m of sum_i q_i (ln(q_i / m_i) + D_i) + g(q).
struct DualNode {
    double D = 0.0;
    std::vector<double> q;
    std::vector<double> m;
    std::vector<double> weights;
    double s = 0.0;  ///< EMM segment parameter (0 when unique)
};

DualNode log_dual_kernels(const Period& period, const std::vector<Kernel>& kernels,
                          const std::vector<double>& child_D, const DualSweep& sweep = {});
DualNode log_dual_entropic(const Period& period, double delta, const std::vector<double>& child_D,
                           const DualSweep& sweep = {});

/// Mixture sum_j w_j kernels[j].q and its penalty.
std::vector<double> mix_kernels(const std::vector<Kernel>& kernels, const std::vector<double>& w,
                                double* penalty = nullptr);

/// KL(q || p) for strictly positive vectors.
double relative_entropy(const std::vector<double>& q, const std::vector<double>& p);

}  // namespace rfc::oracle
