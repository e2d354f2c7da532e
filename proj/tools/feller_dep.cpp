#include "runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <limits>

int main(int argc, char** argv)
{
    CLI::App app{"Simulate jump-Feller processes and test positive dependence"};
    app.require_subcommand(1);

    fellerdep::cli::RunOptions opt;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::string out;
    auto* run = app.add_subcommand("run", "Run one experiment config");
    run->add_option("config", opt.config_path, "Experiment config (JSON)")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Master seed; overrides the config and FELLERDEP_SEED");
    auto* paths_opt = run->add_option("--paths", paths, "Number of simulated paths")->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
    run->add_option("--jobs", opt.jobs, "Worker threads (0 = hardware concurrency)");
    auto* out_opt = run->add_option("--out", out, "Output directory");

    app.add_subcommand("list-presets", "List built-in process presets");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : fellerdep::cli::bad_config;
    }

    if (app.got_subcommand("list-presets"))
    {
        fellerdep::cli::list_presets(std::cout);
        return 0;
    }
    if (*seed_opt)
        opt.seed = seed;
    if (*paths_opt)
        opt.paths = paths;
    if (*out_opt)
        opt.out = out;
    return fellerdep::cli::run(opt, std::cout, std::cerr);
}
