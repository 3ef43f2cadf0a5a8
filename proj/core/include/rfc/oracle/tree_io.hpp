#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "rfc/oracle/family.hpp"
#include "rfc/oracle/solver.hpp"
#include "rfc/oracle/tree.hpp"
#include "rfc/schema.hpp"

namespace rfc::oracle {

struct TreeSpec {
    std::string name;
    TreeMarket market;
    MeasureFamily family;
    Utility utility;
    double x0 = 1.0;
};

/// {"name", "market": {"periods": [{"returns", "p"}]} or
/// {"n_periods", "returns", "p"}, "family": {"type": ...}, "utility", "x0"}.
/// Family types: reference, entropic {delta}, kernels {kernels | per_period},
/// scenarios {windows}, degenerate {lambdas}.
TreeSpec tree_spec_from_json(const nlohmann::json& j, const std::string& path = "tree");
TreeSpec load_tree_spec(const std::filesystem::path& file);

TreeMarket market_from_json(ObjectReader& r);
MeasureFamily family_from_json(ObjectReader& r, const TreeMarket& market);
Utility utility_from_json(ObjectReader& r);

/// Per-node table as CSV: period,node,wealth,value,amount,fraction,worst_q.
void write_solution_csv(std::ostream& out, const TreeSolution& solution);

}  // namespace rfc::oracle
