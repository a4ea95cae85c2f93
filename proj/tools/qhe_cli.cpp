// qhe: three-level quantum heat engine simulations from the command line

#include "qhe/commands.hpp"
#include "qhe/error.hpp"
#include "qhe/version.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Three-level quantum heat engine: steady states, sweeps and orthogonal tests"};
    app.set_version_flag("--version", std::string(qhe::kVersion));
    app.require_subcommand(1, 1);

    std::string config_path, engine, grid, fixture, out_dir, format;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--engine", engine, "kinetic or gkls")->check(CLI::IsMember({"kinetic", "gkls"}));
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed for randomized checks");
    };

    auto* steady = app.add_subcommand("steady", "evaluate one configuration");
    auto* sweep = app.add_subcommand("sweep", "evaluate the (omega20, lam) grid");
    auto* doe = app.add_subcommand("doe", "run the L9 orthogonal test and its analysis");
    auto* validate = app.add_subcommand("validate", "run the invariant checks");
    for (auto* sub : {steady, sweep, doe, validate}) add_common(sub);
    for (auto* sub : {sweep, doe, validate}) sub->add_option("--grid", grid, "NxM: omega20 points by lam points");
    sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    doe->add_option("--fixture", fixture, "analyze results from a file, or 'table4'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qhe::kExitUsage;
    }

    auto build_config = [&] {
        qhe::RunConfig config = config_path.empty() ? qhe::RunConfig{} : qhe::load_config(config_path);
        if (!engine.empty()) config.engine = qhe::parse_engine(engine);
        if (!grid.empty()) qhe::apply_grid_flag(config, grid);
        if (!fixture.empty()) config.fixture = fixture;
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (!format.empty()) config.format = format == "json" ? qhe::OutputFormat::Json : qhe::OutputFormat::Csv;
        for (auto* sub : {steady, sweep, doe, validate}) {
            if (sub->count_all() > 0 && sub->count("--seed") > 0) config.seed = seed;
        }
        return config;
    };

    return qhe::run_command(
        [&] {
            const qhe::RunConfig config = build_config();
            if (*steady) return qhe::cmd_steady(config, std::cout);
            if (*sweep) return qhe::cmd_sweep(config, std::cout);
            if (*doe) return qhe::cmd_doe(config, std::cout);
            return qhe::cmd_validate(config, std::cout);
        },
        std::cerr);
}
