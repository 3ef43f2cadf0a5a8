#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfc/coefficients.hpp"
#include "rfc/grid.hpp"
#include "rfc/schema.hpp"

namespace rfc::app {

struct Context {
    int threads = 0;
    std::uint64_t seed = 0;
    std::filesystem::path config_dir;
};

struct Assertion {
    std::string name;
    bool pass = false;
    nlohmann::json detail;
};

struct Outcome {
    nlohmann::json results = nlohmann::json::object();
    std::vector<Assertion> assertions;
    /// file name -> CSV text
    std::map<std::string, std::string> tables;
    /// echoed into the manifest next to the resolved config
    nlohmann::json inputs = nlohmann::json::object();
};

using Experiment = std::function<Outcome(ObjectReader& params, ObjectReader& root, const Context&)>;

/// Experiment kinds by name.
const std::map<std::string, Experiment>& experiments();

// Shared config pieces.

/// A coefficient: a number, {"type": "linear", "a", "b"} (a + b t),
/// {"type": "table", "values"} or {"type": "random", "mean", "spread"}
/// (per-step mean * exp(spread Z - spread^2 / 2) from the run seed).
struct CoefficientConfig {
    std::string type = "constant";
    double a = 0.0;
    double b = 0.0;
    std::vector<double> values;
    double spread = 0.0;
    std::uint32_t stream = 0;

    CoefficientPath path(const TimeGrid& grid, std::uint64_t seed) const;
    /// Value at any time; constant and linear only.
    std::function<double(double)> continuous(const std::string& where) const;
};

CoefficientConfig coefficient_from(ObjectReader& r, const std::string& key, std::uint32_t stream);
CoefficientConfig coefficient_from(ObjectReader& r, const std::string& key, std::uint32_t stream,
                                   double fallback);

struct MarketConfig {
    MarketCoefficients coeffs;
    TimeGrid grid{1.0, 1};
    double S0 = 1.0;
};

MarketConfig market_from(ObjectReader& root, const Context& ctx);

}  // namespace rfc::app
