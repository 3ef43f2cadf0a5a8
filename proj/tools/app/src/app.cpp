#include "rfc_app/app.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "experiments.hpp"

namespace rfc::app {

namespace {

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

void report(std::ostream& err, const char* kind, const std::string& message, const std::string& path = {})
{
    nlohmann::json j{{"error", kind}, {"message", message}};
    if (!path.empty())
        j["path"] = path;
    err << j.dump() << '\n';
}

}  // namespace

int threads_from_env()
{
    const char* v = std::getenv("ROBUST_FORWARD_THREADS");
    if (!v || !*v)
        return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096)
        return 0;
    return static_cast<int>(n);
}

int run(const RunOptions& options, std::ostream& err)
{
    try {
        const auto config = read_json_file(options.config);
        ObjectReader root(config, "");
        const std::string kind = root.string("experiment");
        const auto& table = experiments();
        const auto it = table.find(kind);
        if (it == table.end())
            throw SchemaError("experiment", "unknown experiment kind \"" + kind + "\"");

        Context ctx;
        ctx.threads = options.threads;
        ctx.seed = root.u64("seed", 42);
        if (options.seed)
            ctx.seed = *options.seed;
        ctx.config_dir = options.config.parent_path();

        nlohmann::json empty = nlohmann::json::object();
        const bool has_params = root.has("params");
        ObjectReader params = has_params ? root.object("params") : ObjectReader(empty, "params");
        Outcome outcome = it->second(params, root, ctx);
        root.finish();

        nlohmann::json resolved = root.resolved();
        resolved["seed"] = ctx.seed;
        if (!has_params)
            resolved["params"] = params.resolved();

        std::error_code ec;
        std::filesystem::create_directories(options.out, ec);
        if (ec)
            throw IoError("cannot create " + options.out.string() + ": " + ec.message());

        auto failures = nlohmann::json::array();
        auto assertions = nlohmann::json::array();
        for (const auto& a : outcome.assertions) {
            assertions.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
            if (!a.pass)
                failures.push_back(a.name);
        }
        nlohmann::json results{{"experiment", kind},
                               {"seed", ctx.seed},
                               {"status", failures.empty() ? "pass" : "fail"},
                               {"assertions", assertions},
                               {"failures", failures},
                               {"results", outcome.results}};
        std::vector<std::string> files{"manifest.json", "results.json"};
        for (const auto& [name, text] : outcome.tables) {
            write_text_file(options.out / name, text);
            files.push_back(name);
        }
        write_text_file(options.out / "results.json", results.dump(2) + "\n");
        nlohmann::json manifest{{"tool", "rfc"},
                                {"timestamp", utc_timestamp()},
                                {"config_path", options.config.string()},
                                {"config", resolved},
                                {"inputs", outcome.inputs},
                                {"threads", options.threads},
                                {"outputs", files}};
        write_text_file(options.out / "manifest.json", manifest.dump(2) + "\n");
        if (!failures.empty()) {
            err << nlohmann::json{{"error", "assertion"}, {"failures", failures}}.dump() << '\n';
            return kAssertionFailed;
        }
        return kOk;
    } catch (const SchemaError& e) {
        report(err, "schema", e.what(), e.path());
        return kSchemaError;
    } catch (const IoError& e) {
        report(err, "io", e.what());
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        report(err, "io", e.what());
        return kIoError;
    } catch (const std::invalid_argument& e) {
        report(err, "schema", e.what());
        return kSchemaError;
    } catch (const std::exception& e) {
        report(err, "runtime", e.what());
        return kAssertionFailed;
    }
}

}  // namespace rfc::app
