#include "rfc/oracle/tree_io.hpp"

#include <limits>
#include <ostream>

namespace rfc::oracle {

namespace {

template <typename F>
auto rethrow_at(const std::string& path, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const SchemaError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
}

Period period_from(ObjectReader& r)
{
    Period p{r.numbers("returns"), r.numbers("p")};
    r.finish();
    return p;
}

Kernel kernel_from(ObjectReader r)
{
    Kernel k;
    k.q = r.numbers("q");
    k.penalty = r.number("penalty", 0.0);
    k.label = r.string("label", "");
    r.finish();
    return k;
}

std::vector<Kernel> kernel_list(ObjectReader& r, const std::string& key)
{
    std::vector<Kernel> out;
    for (auto& k : r.objects(key))
        out.push_back(kernel_from(std::move(k)));
    return out;
}

}  // namespace

TreeMarket market_from_json(ObjectReader& r)
{
    std::vector<Period> periods;
    if (r.has("periods")) {
        for (auto& pr : r.objects("periods"))
            periods.push_back(period_from(pr));
    } else {
        const std::size_t n = r.count("n_periods");
        Period p{r.numbers("returns"), r.numbers("p")};
        periods.assign(n, p);
    }
    r.finish();
    return rethrow_at(r.path(), [&] { return TreeMarket(std::move(periods)); });
}

MeasureFamily family_from_json(ObjectReader& r, const TreeMarket& market)
{
    const std::string type = r.string("type");
    MeasureFamily fam = MeasureFamily::reference(market);
    if (type == "reference") {
    } else if (type == "entropic") {
        const double delta = r.positive("delta");
        fam = MeasureFamily::entropic(delta);
    } else if (type == "kernels") {
        std::vector<std::vector<Kernel>> per;
        if (r.has("per_period")) {
            const auto& arr = r.raw("per_period");
            if (!arr.is_array())
                throw SchemaError(r.child("per_period"), "expected an array of kernel lists");
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const std::string path = r.child("per_period") + "[" + std::to_string(k) + "]";
                if (!arr[k].is_array())
                    throw SchemaError(path, "expected an array of kernels");
                std::vector<Kernel> ks;
                for (std::size_t i = 0; i < arr[k].size(); ++i)
                    ks.push_back(kernel_from(ObjectReader(arr[k][i], path + "[" + std::to_string(i) + "]")));
                per.push_back(std::move(ks));
            }
        } else {
            per.assign(market.n_periods(), kernel_list(r, "kernels"));
        }
        fam = MeasureFamily::kernels(std::move(per));
    } else if (type == "scenarios") {
        std::vector<ScenarioSet> sets;
        for (auto& w : r.objects("windows")) {
            ScenarioSet set;
            set.t = w.count("t");
            set.T = w.count("T");
            for (auto& s : w.objects("scenarios")) {
                Scenario sc;
                const auto& ks = s.raw("kernels");
                if (!ks.is_array())
                    throw SchemaError(s.child("kernels"), "expected one kernel per period");
                for (std::size_t k = 0; k < ks.size(); ++k) {
                    std::vector<double> q;
                    for (std::size_t i = 0; i < ks[k].size(); ++i)
                        q.push_back(json_number(ks[k][i], s.child("kernels") + "[" + std::to_string(k) + "][" +
                                                              std::to_string(i) + "]"));
                    sc.kernels.push_back(std::move(q));
                }
                sc.penalty = s.number("penalty", 0.0);
                sc.label = s.string("label", "");
                s.finish();
                set.scenarios.push_back(std::move(sc));
            }
            w.finish();
            sets.push_back(std::move(set));
        }
        fam = MeasureFamily::scenarios(std::move(sets));
    } else if (type == "degenerate") {
        std::vector<LambdaWindow> table;
        for (auto& e : r.objects("lambdas")) {
            LambdaWindow w;
            w.t = e.count("t");
            w.T = e.count("T");
            w.lambda = e.number("lambda");
            e.finish();
            table.push_back(w);
        }
        fam = rethrow_at(r.path(), [&] { return degenerate_family(market, table); });
    } else {
        throw SchemaError(r.child("type"), "unknown family type \"" + type + "\"");
    }
    r.finish();
    rethrow_at(r.path(), [&] {
        fam.validate(market);
        return 0;
    });
    return fam;
}

Utility utility_from_json(ObjectReader& r)
{
    const std::string type = r.string("type");
    Utility u = Utility::log();
    if (type == "log") {
    } else if (type == "power") {
        const double R = r.positive("R");
        u = rethrow_at(r.child("R"), [&] { return Utility::power(R); });
    } else if (type == "exponential") {
        u = Utility::exponential(r.positive("alpha"));
    } else {
        throw SchemaError(r.child("type"), "unknown utility \"" + type + "\"");
    }
    r.finish();
    return u;
}

TreeSpec tree_spec_from_json(const nlohmann::json& j, const std::string& path)
{
    ObjectReader r(j, path);
    auto mr = r.object("market");
    TreeSpec spec{r.string("name", ""), market_from_json(mr), MeasureFamily::entropic(1.0), Utility::log(), 1.0};
    if (r.has("family")) {
        auto fr = r.object("family");
        spec.family = family_from_json(fr, spec.market);
    } else {
        spec.family = MeasureFamily::reference(spec.market);
    }
    if (r.has("utility")) {
        auto ur = r.object("utility");
        spec.utility = utility_from_json(ur);
    }
    spec.x0 = r.number("x0", 1.0);
    if (spec.utility.needs_positive_wealth() && !(spec.x0 > 0.0))
        throw SchemaError(r.child("x0"), "must be positive for this utility");
    r.finish();
    return spec;
}

TreeSpec load_tree_spec(const std::filesystem::path& file)
{
    return tree_spec_from_json(read_json_file(file), file.filename().string());
}

void write_solution_csv(std::ostream& out, const TreeSolution& solution)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "period,node,wealth,value,amount,fraction,worst_q\n";
    for (const auto& lvl : solution.levels)
        for (const auto& r : lvl) {
            out << r.period << ',' << r.index << ',' << r.wealth << ',' << r.value << ',' << r.amount << ','
                << r.fraction << ',';
            for (std::size_t i = 0; i < r.worst_q.size(); ++i)
                out << (i ? ";" : "") << r.worst_q[i];
            out << '\n';
        }
    out.precision(old);
}

}  // namespace rfc::oracle
