#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mfac/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Model-free adaptive control simulation laboratory"};
    app.require_subcommand(1);

    std::string preset, config_path, out_dir = ".", variants_csv, seeds_csv,
                lambda_grid = "0.1", coeff_path;
    std::uint64_t seed = 0;
    bool no_plots = false;

    auto* run = app.add_subcommand("run", "run one experiment");
    run->add_option("--preset", preset, "preset id (ex1, ex2-case1, ex2-case2, ex3, ex4, nl)");
    run->add_option("--config", config_path, "experiment config file");
    run->add_option("--seed", seed, "random seed");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--no-plots", no_plots, "skip SVG output");

    auto* compare = app.add_subcommand("compare", "compare controller variants across seeds");
    compare->add_option("--preset", preset, "preset id")->required();
    compare->add_option("--variants", variants_csv, "comma list of variant names")->required();
    compare->add_option("--seeds", seeds_csv, "comma list of seeds")->required();
    compare->add_option("--out", out_dir, "output directory");

    auto* poles = app.add_subcommand("poles", "closed-loop roots over a lambda grid");
    poles->add_option("--preset", preset, "preset id");
    poles->add_option("--config", coeff_path, "coefficient file with phi.y / phi.u");
    poles->add_option("--lambda-grid", lambda_grid, "comma list or start:stop:step");
    poles->add_option("--out", out_dir, "output directory");
    poles->add_flag("--no-plots", no_plots, "skip SVG output");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        std::optional<std::uint64_t> seed_opt;
        if (run->count("--seed") > 0) seed_opt = seed;
        return mfac::cmd_run({preset, config_path, seed_opt, out_dir, no_plots},
                             std::cout);
    }
    if (compare->parsed()) {
        std::vector<std::string> variants;
        std::stringstream vs(variants_csv);
        std::string tok;
        while (std::getline(vs, tok, ',')) {
            if (!tok.empty()) variants.push_back(tok);
        }
        std::vector<std::uint64_t> seeds;
        std::stringstream ss(seeds_csv);
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) seeds.push_back(std::stoull(tok));
        }
        return mfac::cmd_compare({preset, variants, seeds, out_dir}, std::cout);
    }
    return mfac::cmd_poles({preset, coeff_path, lambda_grid, out_dir, no_plots},
                           std::cout);
}
