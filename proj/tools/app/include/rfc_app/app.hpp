#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace rfc::app {

enum ExitCode : int {
    kOk = 0,
    kAssertionFailed = 1,
    kSchemaError = 2,
    kIoError = 3,
};

struct RunOptions {
    std::filesystem::path config;
    std::filesystem::path out = "out";
    int threads = 0;  ///< 0: all hardware threads
    std::optional<std::uint64_t> seed;
};

/// Runs one experiment config and writes manifest.json, results.json and
/// the experiment's CSV tables into options.out. Errors are reported on
/// `err` as one JSON line.
int run(const RunOptions& options, std::ostream& err);

/// Thread count from ROBUST_FORWARD_THREADS, 0 when unset or invalid.
int threads_from_env();

}  // namespace rfc::app
