#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfac/simloop.hpp"

namespace mfac {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDivergence = 3;

struct RunManifest {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> files;  // name, digest

    void write(const std::string& path) const;
    static RunManifest read(const std::string& path);
};

struct RunOptions {
    std::string preset;       // preset id, or empty when config_path is set
    std::string config_path;  // full experiment config file
    std::optional<std::uint64_t> seed;  // overrides the config's seed when set
    std::string out_dir = ".";
    bool no_plots = false;
};

/// Run one experiment; write trace.csv, metrics.txt, the three SVG plots
/// and manifest.txt into out_dir. For presets with several controller
/// variants the metrics table carries one column per variant.
int cmd_run(const RunOptions& opts, std::ostream& log);

struct CompareOptions {
    std::string preset;
    std::vector<std::string> variants;  // >= 2
    std::vector<std::uint64_t> seeds;
    std::string out_dir = ".";
};

/// Mean/stddev of eitae per variant across seeds plus the win rate against
/// the first variant; one experiment per worker.
int cmd_compare(const CompareOptions& opts, std::ostream& log);

struct PolesOptions {
    std::string preset;       // uses the first regime's true coefficients
    std::string coeff_path;   // or a file with phi.y / phi.u lists
    std::string lambda_grid;  // "a,b,c" or "start:stop:step"
    std::string out_dir = ".";
    bool no_plots = false;
};

/// Roots and stability verdict of the closed-loop polynomial over a lambda
/// grid, with a unit-circle plot.
int cmd_poles(const PolesOptions& opts, std::ostream& log);

/// Build a full ExperimentConfig from a flat key-value config file.
/// Throws ConfigError naming the offending key.
ExperimentConfig experiment_from_config(const std::string& path);

std::vector<double> parse_lambda_grid(const std::string& spec);

}  // namespace mfac
