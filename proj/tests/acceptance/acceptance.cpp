// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rfc/criteria.hpp"
#include "rfc/dualpde.hpp"
#include "rfc/oracle/checks.hpp"
#include "rfc/oracle/inconsistency.hpp"
#include "rfc/oracle/tree_io.hpp"
#include "rfc/paths.hpp"
#include "rfc/rng.hpp"
#include "rfc/strategies.hpp"
#include "rfc/verify.hpp"

namespace fs = std::filesystem;
using namespace rfc;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& what, const std::string& detail)
{
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " | " << detail << std::endl;
    failures += pass ? 0 : 1;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

MarketCoefficients reference_market()
{
    MarketCoefficients c;
    c.sigma = 0.2;
    c.lambda_hat = 0.3;
    c.delta = 1.0;
    return c;
}

oracle::TreeSpec tree(const std::string& name)
{
    return oracle::load_tree_spec(fs::path(RFC_SOURCE_DIR) / "data" / "trees" / (name + ".json"));
}

const std::vector<std::string> kTrees{"complete_binomial", "trinomial_3measure", "entropic", "degenerate",
                                      "nonpasted"};

void saddle_martingale()
{
    const TimeGrid grid(1.0, 252);
    const auto c = reference_market();
    const auto field = field_log(c, grid);
    DriftOptions opt;
    opt.threads = 1;
    const auto start = std::chrono::steady_clock::now();
    const auto saddle = drift_test(field, fractional_kelly(c), worst_case_generator(c), PenaltySpec::quadratic(1.0),
                                   0.0, 1.0, 100000, 42, opt);
    const auto ref = drift_test(field, fractional_kelly(c), GeneratorSpec::zero(), PenaltySpec::quadratic(1.0), 0.0,
                                1.0, 100000, 42, opt);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool a = std::abs(saddle.estimate) <= 3.0 * saddle.std_error;
    const bool b = std::abs(ref.estimate - 0.01125) <= 3.0 * ref.std_error;
    verdict(1, a && b && seconds < 60.0, "saddle martingale and reference drift (1e5 paths, 1 thread)",
            "saddle " + fmt(saddle.estimate) + " +- " + fmt(saddle.std_error) + ", reference " + fmt(ref.estimate) +
                " +- " + fmt(ref.std_error) + " vs 0.01125, " + fmt(seconds) + " s");
}

void self_generation()
{
    const TimeGrid grid(1.0, 252);
    const auto field = field_log(reference_market(), grid);
    const std::vector<double> g{0.5, 0.75, 1.0, 1.25, 1.5};
    ScanOptions so;
    so.threads = 0;
    const auto r = self_generation_scan(field, 0.0, 1.0, g, g, 20000, 42, so);
    const auto& centre = r.value[2][2];
    const double se = std::max(centre.std_error, kVertexFloor);
    const bool certified = std::abs(centre.mean - r.target) <= 3.0 * se;
    std::string checks;
    for (const auto& c : r.checks)
        checks += c.name + (c.pass ? "=ok " : "=no ");
    verdict(2, r.saddle && certified, "self-generation scan over rho, c in {0.5..1.5}",
            "U(1,0) " + fmt(centre.mean) + " vs " + fmt(r.target) + ", rho vertex " + fmt(r.rho_fit.vertex) + " +- " +
                fmt(r.rho_fit.half_width) + ", c vertex " + fmt(r.c_fit.vertex) + " +- " + fmt(r.c_fit.half_width) +
                ", " + checks);
}

void duality()
{
    bool ok = true;
    std::string detail;
    for (const char* name : {"complete_binomial", "trinomial_3measure", "entropic"}) {
        const auto s = tree(name);
        const auto r = oracle::check_duality(s.market, s.family, s.utility, s.x0);
        ok = ok && std::abs(r.gap) <= 1e-6 && r.halves;
        detail += std::string(name) + " gap " + fmt(r.gap) + (r.halves ? " halves; " : " NOT halving; ");
    }
    verdict(3, ok, "tree duality gap <= 1e-6 with halving under refinement", detail);
}

void dpp_and_consistency()
{
    bool ok = true;
    std::string detail;
    for (const char* name : {"complete_binomial", "trinomial_3measure", "entropic"}) {
        const auto s = tree(name);
        const auto d = oracle::check_dpp(s.market, s.family, 1e-8);
        ok = ok && d.pass;
        detail += std::string(name) + " dpp " + fmt(d.max_residual) + "; ";
    }
    for (auto [name, T, Tb] : {std::tuple{"entropic", 2, 3}, std::tuple{"trinomial_3measure", 1, 2}}) {
        const auto s = tree(name);
        const auto c = oracle::check_time_consistency(s.market, s.family, T, Tb, 1e-8);
        ok = ok && c.pass();
        detail += std::string(name) + " restriction/rolling " + (c.pass() ? "exact" : "broken") + "; ";
    }
    const auto deg = tree("degenerate");
    const auto sol = oracle::solve_primal(deg.market, deg.family, deg.utility, deg.x0);
    const auto dd = oracle::check_dpp(deg.market, deg.family, 1e-8);
    const auto dc = oracle::check_time_consistency(deg.market, deg.family, 1, 2, 1e-8);
    const double identity = std::abs(sol.value - std::log(deg.x0));
    const bool strategy_inc = !dc.rolling && dc.rolling_gap > 1e-6;
    const bool horizon_inc = dc.horizon_gap > 1e-6;
    const auto demo = oracle::inconsistency_demo_continuous({{0.0, 1.0, 0.2}, {0.0, 2.0, 0.1}, {1.0, 2.0, 0.3}}, 0.2,
                                                            TimeGrid(2.0, 8));
    ok = ok && dd.max_residual <= 1e-8 && identity <= 1e-12 && strategy_inc && horizon_inc &&
         demo.max_residual == 0.0 && demo.strategy_inconsistent && demo.horizon_inconsistent;
    detail += "degenerate value residual " + fmt(dd.max_residual) + ", |u - ln x| " + fmt(identity) +
              ", pi gap (0,2) vs (1,2) " + fmt(dc.rolling_gap) + ", horizon gap " + fmt(dc.horizon_gap) +
              ", continuous identity residual " + fmt(demo.max_residual);
    verdict(4, ok, "DPP, time consistency and the degenerate counterexample", detail);
}

void dual_drift_hjb()
{
    const double delta = 1.0, lam = 0.2;
    const auto g = PenaltyIntegrand::quadratic(delta);
    const auto rel = drift_from_relation(g, {0.0, 0.0}, lam);
    const double stationary = -delta * lam * lam / (2.0 * (1.0 + delta));
    const bool drift_ok = !rel.unbounded && std::abs(rel.b - stationary) <= 1e-6;

    // log ansatz with lambda_hat(t) = 0.3 + 0.5 t and the exact drift
    const auto A = [&](double t) {
        const double u = 0.3 + 0.5 * t;
        return -delta / (2.0 * (1.0 + delta)) * (u * u * u - 0.027) / 1.5;
    };
    std::vector<double> errs;
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
        std::vector<double> times(n + 1), a(n + 1), l(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            times[k] = double(k) / double(n);
            a[k] = A(times[k]);
            l[k] = 0.3 + 0.5 * times[k];
        }
        errs.push_back(hjb_residual(sample_log_dual(0.1, 10.0, 101, times, a), g, l, 0).max_abs);
    }
    bool rate_ok = true;
    std::string rates;
    for (std::size_t i = 1; i < errs.size(); ++i) {
        const double r = std::log2(errs[i - 1] / errs[i]);
        rate_ok = rate_ok && std::abs(r - 2.0) <= 0.2;
        rates += fmt(r) + " ";
    }

    // constant ansatz misses the drift by |stationary value| at every node
    const double lc = 0.3;
    const double margin = delta * lc * lc / (2.0 * (1.0 + delta));
    std::vector<double> times(17), zero(17, 0.0), l(17, lc);
    for (std::size_t k = 0; k <= 16; ++k)
        times[k] = k / 16.0;
    const auto neg = hjb_residual(sample_log_dual(0.1, 10.0, 101, times, zero), g, l, 0);
    double min_abs = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < neg.residual.size(); ++k)
        for (std::size_t j = 1; j + 1 < neg.residual[k].size(); ++j)
            min_abs = std::min(min_abs, std::abs(neg.residual[k][j]));
    const bool neg_ok = min_abs >= margin - 1e-9;
    verdict(5, drift_ok && rate_ok && neg_ok, "dual drift relation, HJB residual rate, negative control",
            "b " + fmt(rel.b) + " vs " + fmt(stationary) + ", rates " + rates + ", negative control min |r| " +
                fmt(min_abs) + " vs margin " + fmt(margin));
}

void equivalence()
{
    // random per-step coefficient tables, lognormal around (0.2, 0.3, 1)
    const TimeGrid grid(1.0, 252);
    double worst_pi = 0.0, worst_drift = 0.0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        std::vector<double> s(252), l(252), d(252);
        for (std::uint32_t k = 0; k < 252; ++k) {
            const auto z = normal_pair({seed, 0x20000000u, k}, 0);
            const auto w = normal_pair({seed, 0x20000001u, k}, 0);
            s[k] = 0.2 * std::exp(0.3 * z[0]);
            l[k] = 0.3 * z[1];
            d[k] = std::exp(0.5 * w[0]);
        }
        MarketCoefficients c;
        c.sigma = CoefficientPath::tabulated(s);
        c.lambda_hat = CoefficientPath::tabulated(l);
        c.delta = CoefficientPath::tabulated(d);
        const auto field = field_log(c, grid);
        const auto paths = simulate_ensemble(c, grid, 4, seed, 1);
        const auto pi = fractional_kelly(c);
        for (const auto& p : paths) {
            const auto eq = equivalent_standard_fields(field, doleans(worst_case_generator(c), p));
            const auto lbar = equivalent_mpr(field.coeffs());
            for (std::size_t k = 0; k < 252; ++k) {
                StepState st;
                static_cast<MarketState&>(st) = p.state(k);
                const double a = lbar[k] / s[k], b = pi.fraction(st);
                worst_pi = std::max(worst_pi, std::abs(a - b) / std::max(1.0, std::abs(b)));
            }
            for (std::size_t k = 0; k <= 252; ++k) {
                const double lhs = eq.tilted_drift[k];
                const double rhs = eq.lambda_bar_field.drift(k);
                worst_drift = std::max(worst_drift, std::abs(lhs - rhs));
            }
        }
    }
    const double eps = std::numeric_limits<double>::epsilon();
    verdict(6, worst_pi <= 8.0 * eps && worst_drift <= 1e-14,
            "lambda_bar / sigma = pi_bar pathwise; A + int g(eta_bar) = -1/2 int lambda_bar^2",
            "max rel fraction gap " + fmt(worst_pi) + ", max drift gap " + fmt(worst_drift));
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void determinism()
{
    const fs::path root = fs::current_path() / "acceptance_runs";
    fs::remove_all(root);
    bool ok = true;
    std::size_t compared = 0;
    std::string detail;
    std::vector<fs::path> configs;
    for (const auto& e : fs::directory_iterator(fs::path(RFC_SOURCE_DIR) / "configs"))
        if (e.path().extension() == ".json")
            configs.push_back(e.path());
    std::sort(configs.begin(), configs.end());
    for (const auto& cfg : configs) {
        const std::string stem = cfg.stem().string();
        std::vector<fs::path> outs;
        for (int threads : {1, 2, 8}) {
            const auto out = root / stem / std::to_string(threads);
            const std::string cmd = std::string(RFC_BINARY) + " --config " + cfg.string() + " --out " + out.string() +
                                    " --threads " + std::to_string(threads) + " > /dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                ok = false;
                detail += stem + " exit " + std::to_string(WEXITSTATUS(status)) + "; ";
            }
            outs.push_back(out);
        }
        for (const auto& e : fs::directory_iterator(outs[0])) {
            const auto name = e.path().filename();
            if (name == "manifest.json")
                continue;
            const auto a = slurp(e.path());
            for (std::size_t i = 1; i < outs.size(); ++i) {
                if (!fs::exists(outs[i] / name) || slurp(outs[i] / name) != a) {
                    ok = false;
                    detail += stem + "/" + name.string() + " differs; ";
                }
            }
            ++compared;
        }
    }
    verdict(7, ok, "byte-identical outputs at 1, 2 and 8 threads",
            std::to_string(configs.size()) + " configs, " + std::to_string(compared) + " files; " + detail);
}

void entropic_reduction()
{
    bool ok = true;
    double worst = 0.0;
    for (const auto& name : kTrees) {
        const auto s = tree(name);
        const auto r = oracle::check_entropic_reduction(s.market, 1.0, oracle::Utility::log(), s.x0, 1e-8);
        ok = ok && r.pass;
        worst = std::max(worst, std::abs(r.gap));
    }
    verdict(8, ok, "entropic robust value equals the certainty equivalent on every bundled market",
            std::to_string(kTrees.size()) + " markets, max gap " + fmt(worst));
}

}  // namespace

int main()
{
    const std::vector<void (*)()> criteria{saddle_martingale, self_generation,  duality,     dpp_and_consistency,
                                           dual_drift_hjb,    equivalence,      determinism, entropic_reduction};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            verdict(static_cast<int>(i + 1), false, "threw", e.what());
        }
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
