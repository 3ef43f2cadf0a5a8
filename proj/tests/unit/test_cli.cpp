#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "rfc_app/app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = fs::path(RFC_SOURCE_DIR) / "configs";

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const json& j)
{
    const auto p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

struct Result {
    int code;
    std::string err;
};

Result run_inproc(const fs::path& config, const fs::path& out, int threads = 1)
{
    rfc::app::RunOptions o;
    o.config = config;
    o.out = out;
    o.threads = threads;
    std::ostringstream err;
    const int code = rfc::app::run(o, err);
    return {code, err.str()};
}

// Runs the installed binary and returns its exit status.
int run_binary(const std::string& args, const fs::path& err_file)
{
    const std::string cmd = std::string(RFC_BINARY) + " " + args + " 2> " + err_file.string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json base_market() { return {{"sigma", 0.2}, {"lambda_hat", 0.3}, {"delta", 1.0}, {"horizon", 1.0}, {"steps", 20}}; }

}  // namespace

TEST_CASE("bundled quick configs pass")
{
    for (const char* name : {"simulate", "tree_duality", "tree_dpp", "tree_dpp_nonpasted", "tree_consistency",
                             "tree_consistency_degenerate", "inconsistency_demo", "pde_drift", "pde_residual",
                             "pde_negative_control"}) {
        CAPTURE(name);
        const auto out = scratch(name);
        const auto r = run_inproc(kConfigs / (std::string(name) + ".json"), out);
        CHECK(r.code == 0);
        CHECK(r.err.empty());
        const auto results = json::parse(slurp(out / "results.json"));
        CHECK(results.at("status") == "pass");
        CHECK(results.at("failures").empty());
        const auto manifest = json::parse(slurp(out / "manifest.json"));
        CHECK(manifest.contains("timestamp"));
        CHECK(manifest.at("config").contains("experiment"));
        for (const auto& f : manifest.at("outputs"))
            CHECK(fs::exists(out / f.get<std::string>()));
    }
}

TEST_CASE("resolved config echoes defaults")
{
    const auto dir = scratch("defaults");
    const auto cfg = write_config(dir, {{"experiment", "simulate"}, {"market", base_market()}, {"params", json::object()}});
    REQUIRE(run_inproc(cfg, dir / "out").code == 0);
    const auto manifest = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest.at("config").at("seed") == 42);
    CHECK(manifest.at("config").at("params").at("n_paths") == 1000);
    CHECK(manifest.at("config").at("market").at("S0") == 1.0);
}

TEST_CASE("schema errors exit 2 with the field path")
{
    const auto dir = scratch("schema");
    auto market = base_market();
    market.erase("sigma");
    const auto cfg = write_config(dir, {{"experiment", "simulate"}, {"market", market}});
    const auto r = run_inproc(cfg, dir / "out");
    CHECK(r.code == 2);
    const auto line = json::parse(r.err);
    CHECK(line.at("error") == "schema");
    CHECK(line.at("path") == "market.sigma");

    const auto cfg2 = write_config(dir, {{"experiment", "simulate"}, {"market", base_market()}, {"params", {{"n_path", 5}}}});
    const auto r2 = run_inproc(cfg2, dir / "out");
    CHECK(r2.code == 2);
    CHECK(json::parse(r2.err).at("path") == "params.n_path");

    const auto cfg3 = write_config(dir, {{"experiment", "levitate"}});
    CHECK(run_inproc(cfg3, dir / "out").code == 2);

    auto zero = base_market();
    zero["sigma"] = 0.0;
    const auto cfg4 = write_config(dir, {{"experiment", "simulate"}, {"market", zero}});
    CHECK(run_inproc(cfg4, dir / "out").code == 2);

    std::ofstream(dir / "broken.json") << "{\"experiment\": ";
    CHECK(run_inproc(dir / "broken.json", dir / "out").code == 2);
}

TEST_CASE("missing inputs exit 3")
{
    const auto dir = scratch("io");
    CHECK(run_inproc(dir / "absent.json", dir / "out").code == 3);
    const auto cfg = write_config(dir, {{"experiment", "tree-dpp"}, {"params", {{"tree", "no/such/tree.json"}}}});
    CHECK(run_inproc(cfg, dir / "out").code == 3);
}

TEST_CASE("failed assertions exit 1 and still write results")
{
    const auto dir = scratch("assert");
    const auto cfg = write_config(dir, {{"experiment", "tree-dpp"},
                                        {"params", {{"tree", (fs::path(RFC_SOURCE_DIR) / "data/trees/entropic.json").string()},
                                                    {"expect", "violation"}}}});
    const auto r = run_inproc(cfg, dir / "out");
    CHECK(r.code == 1);
    CHECK(json::parse(r.err).at("error") == "assertion");
    const auto results = json::parse(slurp(dir / "out" / "results.json"));
    CHECK(results.at("status") == "fail");
    CHECK_FALSE(results.at("failures").empty());
}

TEST_CASE("binary entry point")
{
    const auto dir = scratch("binary");
    const auto err = dir / "stderr.txt";
    CHECK(run_binary("--config " + (kConfigs / "pde_drift.json").string() + " --out " + (dir / "a").string() +
                         " --threads 2",
                     err) == 0);
    CHECK(fs::exists(dir / "a" / "results.json"));
    CHECK(run_binary("--out " + (dir / "b").string(), err) == 2);
    CHECK(run_binary("--config " + (kConfigs / "pde_drift.json").string() + " --threads 0", err) == 2);
    CHECK(run_binary("--config " + (dir / "missing.json").string() + " --out " + (dir / "c").string(), err) == 3);
    CHECK(json::parse(slurp(err)).at("error") == "io");

    // --seed overrides the config seed
    REQUIRE(run_binary("--config " + (kConfigs / "simulate.json").string() + " --out " + (dir / "s").string() +
                           " --seed 7",
                       err) == 0);
    CHECK(json::parse(slurp(dir / "s" / "results.json")).at("seed") == 7);
}

TEST_CASE("thread count from the environment")
{
    ::setenv("ROBUST_FORWARD_THREADS", "3", 1);
    CHECK(rfc::app::threads_from_env() == 3);
    ::setenv("ROBUST_FORWARD_THREADS", "many", 1);
    CHECK(rfc::app::threads_from_env() == 0);
    ::unsetenv("ROBUST_FORWARD_THREADS");
    CHECK(rfc::app::threads_from_env() == 0);
}

TEST_CASE("outputs do not depend on the worker count")
{
    for (const char* name : {"simulate", "tree_duality", "pde_residual"}) {
        CAPTURE(name);
        const auto one = scratch(std::string(name) + "_1");
        const auto four = scratch(std::string(name) + "_4");
        REQUIRE(run_inproc(kConfigs / (std::string(name) + ".json"), one, 1).code == 0);
        REQUIRE(run_inproc(kConfigs / (std::string(name) + ".json"), four, 4).code == 0);
        for (const auto& entry : fs::directory_iterator(one)) {
            if (entry.path().filename() == "manifest.json")
                continue;
            CHECK(slurp(entry.path()) == slurp(four / entry.path().filename()));
        }
    }
}
