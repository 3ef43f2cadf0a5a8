#include <iostream>

#include <CLI11.hpp>

#include "rfc_app/app.hpp"

int main(int argc, char** argv)
{
    CLI::App cli{"Robust forward criteria: simulation, verification and tree oracles"};
    rfc::app::RunOptions opts;
    std::string config, out = "out";
    int threads = 0;
    std::uint64_t seed = 0;
    cli.add_option("--config", config, "experiment config (JSON)")->required();
    cli.add_option("--out", out, "output directory")->capture_default_str();
    auto* t_opt = cli.add_option("--threads", threads, "worker threads (default: all)")->check(CLI::PositiveNumber);
    auto* s_opt = cli.add_option("--seed", seed, "overrides the config seed");
    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : rfc::app::kSchemaError;
    }
    opts.config = config;
    opts.out = out;
    opts.threads = *t_opt ? threads : rfc::app::threads_from_env();
    if (*s_opt)
        opts.seed = seed;
    return rfc::app::run(opts, std::cerr);
}
