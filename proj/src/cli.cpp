#include "mfac/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>
#include <optional>
#include <sstream>

#include "mfac/config.hpp"
#include "mfac/svg.hpp"

namespace mfac {

namespace fs = std::filesystem;

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

DisturbanceSpec disturbance_from_config(const KeyValueConfig& cfg,
                                        const std::string& section) {
    DisturbanceSpec d;
    const std::string kind = cfg.get_string(section + ".kind", "none");
    if (kind == "none") {
        d.kind = DisturbanceSpec::Kind::none;
    } else if (kind == "white") {
        d.kind = DisturbanceSpec::Kind::white_noise;
        d.variance = cfg.get_double(section + ".variance");
    } else if (kind == "schedule") {
        d.kind = DisturbanceSpec::Kind::constant_schedule;
        std::stringstream ss(cfg.get_string(section + ".schedule"));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) {
                throw ConfigError("config key '" + section +
                                  ".schedule': expected k_end:level items");
            }
            d.schedule.emplace_back(std::stoi(item.substr(0, colon)),
                                    std::strtod(item.substr(colon + 1).c_str(), nullptr));
        }
        if (d.schedule.empty()) {
            throw ConfigError("config key '" + section + ".schedule': empty");
        }
    } else if (kind == "sinusoid") {
        d.kind = DisturbanceSpec::Kind::sinusoid;
        d.amplitude = cfg.get_double(section + ".amplitude");
        d.rate = cfg.get_double(section + ".rate");
    } else {
        throw ConfigError("config key '" + section + ".kind': unknown kind '" +
                          kind + "'");
    }
    return d;
}

Variant variant_from_name(const std::string& name, const std::string& key) {
    if (name == "basic") return Variant::basic;
    if (name == "lambda") return Variant::lambda_weighted;
    if (name == "stochastic") return Variant::stochastic;
    if (name == "poly") return Variant::poly_cost;
    if (name == "measured") return Variant::measured_disturbance;
    if (name == "mvc") return Variant::mvc_baseline;
    throw ConfigError("config key '" + key + "': unknown variant '" + name + "'");
}

PlantModel plant_from_config(const KeyValueConfig& cfg) {
    std::vector<Regime> regimes;
    for (int i = 1;; ++i) {
        const std::string sec = "plant.regime" + std::to_string(i);
        if (!cfg.has(sec + ".k_end")) break;
        Regime r;
        r.k_end = static_cast<int>(cfg.get_int(sec + ".k_end"));
        if (cfg.has(sec + ".nonlinear")) {
            const std::string kind = cfg.get_string(sec + ".nonlinear");
            if (kind != "cubic_input") {
                throw ConfigError("config key '" + sec +
                                  ".nonlinear': unknown map '" + kind + "'");
            }
            r.spec = NonlinearKind::cubic_input;
        } else {
            LinearRegime lin;
            lin.a = Polynomial(cfg.get_doubles(sec + ".a"));
            lin.b = Polynomial(cfg.get_doubles(sec + ".b"));
            lin.c = Polynomial(cfg.get_doubles(sec + ".c", {1.0}));
            lin.v = Polynomial(cfg.get_doubles(sec + ".v", {0.0}));
            if (std::abs(lin.a.constant_term() - 1.0) > 1e-12) {
                throw ConfigError("config key '" + sec + ".a': A must be monic");
            }
            r.spec = lin;
        }
        regimes.push_back(std::move(r));
    }
    if (regimes.empty()) {
        throw ConfigError("missing config key 'plant.regime1.k_end'");
    }
    return PlantModel(std::move(regimes));
}

}  // namespace

ExperimentConfig experiment_from_config(const std::string& path) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(path);

    ControllerConfig ctl;
    ctl.orders.ly = static_cast<int>(cfg.get_int("controller.ly"));
    ctl.orders.lu = static_cast<int>(cfg.get_int("controller.lu"));
    ctl.orders.lv = static_cast<int>(cfg.get_int("controller.lv", 0));
    ctl.orders.lw = static_cast<int>(cfg.get_int("controller.lw", 0));
    ctl.lambda = cfg.get_double("controller.lambda", 0.0);
    ctl.p_poly = Polynomial(cfg.get_doubles("controller.p", {1.0}));
    ctl.r_poly = Polynomial(cfg.get_doubles("controller.r", {1.0}));
    ctl.lambda_poly = Polynomial(cfg.get_doubles("controller.lam", {0.0}));
    ctl.s_poly = Polynomial(cfg.get_doubles("controller.s", {0.0}));
    ctl.design_s_online = cfg.get_bool("controller.design_s", false);
    ctl.s_max_degree = static_cast<int>(cfg.get_int("controller.s_max_degree", 8));
    ctl.epsilon_gain = cfg.get_double("controller.epsilon_gain", 1e-8);
    ctl.variant = variant_from_name(cfg.get_string("controller.variant"),
                                    "controller.variant");

    EstimatorChoice est;
    const std::string ek = cfg.get_string("estimator.kind", "projection");
    if (ek == "projection") {
        est.kind = EstimatorChoice::Kind::projection;
    } else if (ek == "rls") {
        est.kind = EstimatorChoice::Kind::rls;
    } else if (ek == "frozen") {
        est.kind = EstimatorChoice::Kind::frozen;
    } else {
        throw ConfigError("config key 'estimator.kind': unknown kind '" + ek + "'");
    }
    est.eta = cfg.get_double("estimator.eta", 3.0);
    est.mu = cfg.get_double("estimator.mu", 1.0);
    est.p0 = cfg.get_double("estimator.p0", 1e6);
    est.forgetting = cfg.get_double("estimator.forgetting", 1.0);

    ExperimentConfig out{
        .plant = plant_from_config(cfg),
        .controller = ctl,
        .estimator = est,
        .noise = disturbance_from_config(cfg, "noise"),
        .vdist = disturbance_from_config(cfg, "vdist"),
        .reference = {cfg.get_double("reference.amplitude"),
                      static_cast<int>(cfg.get_int("reference.half_period"))},
        .phi0 = cfg.get_doubles("init.phi"),
        .init_y = cfg.get_doubles("init.y", {0.0}),
        .init_u = cfg.get_doubles("init.u", {0.0}),
        .horizon = static_cast<int>(cfg.get_int("horizon")),
        .seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0)),
        .record_poles = cfg.get_bool("record_poles", false),
    };
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid experiment config: ") + e.what());
    }
    return out;
}

void RunManifest::write(const std::string& path) const {
    std::string body = "experiment: " + experiment + "\n";
    body += "seed: " + std::to_string(seed) + "\n";
    for (const auto& [name, digest] : files) {
        body += "file: " + name + " fnv1a:" + digest + "\n";
    }
    write_file(path, body);
}

RunManifest RunManifest::read(const std::string& path) {
    RunManifest m;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read manifest '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("experiment: ", 0) == 0) {
            m.experiment = line.substr(12);
        } else if (line.rfind("seed: ", 0) == 0) {
            m.seed = std::stoull(line.substr(6));
        } else if (line.rfind("file: ", 0) == 0) {
            const auto sep = line.rfind(" fnv1a:");
            if (sep == std::string::npos) continue;
            m.files.emplace_back(line.substr(6, sep - 6), line.substr(sep + 7));
        }
    }
    return m;
}

namespace {

struct NamedRun {
    std::string name;
    RunResult result;
};

std::string metrics_table(const std::string& experiment, std::uint64_t seed,
                          int horizon, const std::vector<NamedRun>& runs) {
    std::string body;
    body += "experiment: " + experiment + "\n";
    body += "seed: " + std::to_string(seed) + "\n";
    body += "horizon: " + std::to_string(horizon) + "\n\n";

    auto row = [&](const std::string& label, auto getter) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-26s", label.c_str());
        body += buf;
        for (const auto& r : runs) {
            std::snprintf(buf, sizeof buf, " | %14s", getter(r).c_str());
            body += buf;
        }
        body += "\n";
    };
    row("metric", [](const NamedRun& r) { return r.name; });
    body += std::string(26 + runs.size() * 17, '-') + "\n";
    row("eITAE (sum e^2)",
        [](const NamedRun& r) { return fmt(r.result.metrics.eitae); });
    row("ITAE (sum k*|e|)",
        [](const NamedRun& r) { return fmt(r.result.metrics.itae_time_weighted); });
    row("mean segment tail |e|", [](const NamedRun& r) {
        const auto& t = r.result.metrics.segment_tail_error;
        const double m = t.empty() ? 0.0
                                   : std::accumulate(t.begin(), t.end(), 0.0) /
                                         static_cast<double>(t.size());
        return fmt(m);
    });
    row("unstable pole steps", [](const NamedRun& r) {
        return std::to_string(r.result.metrics.unstable_pole_steps);
    });
    row("halted", [](const NamedRun& r) {
        return r.result.completed ? std::string("-")
                                  : "step " + std::to_string(r.result.metrics.halt_step);
    });
    for (const auto& r : runs) {
        if (!r.result.completed) {
            body += "\nhalt (" + r.name + "): " + r.result.metrics.halt_reason + "\n";
        }
    }
    return body;
}

void emit_plots(const std::string& out_dir, const RunResult& run,
                RunManifest& manifest) {
    std::vector<double> ks, ys, ystars, us;
    for (const auto& r : run.trace) {
        ks.push_back(r.k);
        ys.push_back(r.y);
        ystars.push_back(r.y_star);
        us.push_back(r.u);
    }
    const std::string tracking = svg_line_chart(
        "Tracking performance", "k", "output",
        {{"y", kPalette[0], ks, ys}, {"y*", kPalette[1], ks, ystars}});
    const std::string input =
        svg_line_chart("Control input", "k", "u", {{"u", kPalette[2], ks, us}});

    std::vector<SvgSeries> pg;
    const std::size_t nphi = run.trace.empty() ? 0 : run.trace.front().phi_hat.size();
    for (std::size_t i = 0; i < nphi; ++i) {
        SvgSeries s{"phi_" + std::to_string(i + 1), kPalette[i % 10], ks, {}};
        s.y.reserve(run.trace.size());
        for (const auto& r : run.trace) s.y.push_back(r.phi_hat[i]);
        pg.push_back(std::move(s));
    }
    const std::string pg_svg =
        svg_line_chart("Estimated PG components", "k", "phi_hat", pg);

    for (const auto& [name, content] :
         {std::pair<std::string, const std::string&>{"tracking.svg", tracking},
          {"input.svg", input},
          {"pg.svg", pg_svg}}) {
        write_file(out_dir + "/" + name, content);
        manifest.files.emplace_back(name, digest_hex(content));
    }
}

}  // namespace

int cmd_run(const RunOptions& opts, std::ostream& log) {
    ExperimentConfig cfg;
    std::string experiment;
    std::vector<std::string> extra_variants;
    std::optional<ExperimentPreset> preset;
    try {
        if (!opts.preset.empty()) {
            preset = make_example(opts.preset);
            experiment = preset->id;
            cfg = make_config(*preset, "", opts.seed.value_or(0));
            cfg.record_poles = true;
            for (const auto& name : preset->variant_names()) {
                if (name != preset->variants.front().first) extra_variants.push_back(name);
            }
        } else if (!opts.config_path.empty()) {
            cfg = experiment_from_config(opts.config_path);
            if (opts.seed) cfg.seed = *opts.seed;
            experiment = fs::path(opts.config_path).stem().string();
        } else {
            throw ConfigError("either a preset id or a config path is required");
        }
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    fs::create_directories(opts.out_dir);

    std::vector<NamedRun> runs;
    runs.push_back({preset ? preset->variants.front().first : "run",
                    run_experiment(cfg)});
    for (const auto& name : extra_variants) {
        ExperimentConfig vcfg = make_config(*preset, name, cfg.seed);
        vcfg.record_poles = true;
        runs.push_back({name, run_experiment(vcfg)});
    }
    const RunResult& main_run = runs.front().result;

    RunManifest manifest{experiment, cfg.seed, {}};
    {
        std::ostringstream csv;
        write_trace_csv(csv, main_run.trace);
        write_file(opts.out_dir + "/trace.csv", csv.str());
        manifest.files.emplace_back("trace.csv", digest_hex(csv.str()));
    }
    const std::string metrics =
        metrics_table(experiment, cfg.seed, cfg.horizon, runs);
    write_file(opts.out_dir + "/metrics.txt", metrics);
    manifest.files.emplace_back("metrics.txt", digest_hex(metrics));
    if (!opts.no_plots) emit_plots(opts.out_dir, main_run, manifest);
    manifest.write(opts.out_dir + "/manifest.txt");

    log << metrics;
    if (!main_run.completed) {
        log << "run halted at step " << main_run.metrics.halt_step << ": "
            << main_run.metrics.halt_reason << "\n";
        return kExitDivergence;
    }
    return kExitOk;
}

int cmd_compare(const CompareOptions& opts, std::ostream& log) {
    if (opts.variants.size() < 2) {
        log << "config error: cmd_compare needs at least two variants\n";
        return kExitConfigError;
    }
    if (opts.seeds.empty()) {
        log << "config error: cmd_compare needs at least one seed\n";
        return kExitConfigError;
    }
    std::optional<ExperimentPreset> preset;
    try {
        preset = make_example(opts.preset);
        for (const auto& v : opts.variants) (void)preset->variant_config(v);
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    // one experiment per worker; nothing shared
    std::vector<std::vector<std::future<RunResult>>> futures(opts.variants.size());
    for (std::size_t vi = 0; vi < opts.variants.size(); ++vi) {
        for (std::uint64_t seed : opts.seeds) {
            ExperimentConfig cfg = make_config(*preset, opts.variants[vi], seed);
            futures[vi].push_back(std::async(
                std::launch::async,
                [](ExperimentConfig c) { return run_experiment(c); }, std::move(cfg)));
        }
    }
    std::vector<std::vector<RunResult>> results(opts.variants.size());
    for (std::size_t vi = 0; vi < futures.size(); ++vi) {
        for (auto& f : futures[vi]) results[vi].push_back(f.get());
    }

    std::string body = "experiment: " + preset->id + "\n";
    body += "seeds: " + std::to_string(opts.seeds.size()) + "\n\n";
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-12s %14s %14s %14s %10s\n", "variant",
                  "mean eITAE", "std eITAE", "tail |e|", "win rate");
    body += buf;
    bool any_halt = false;
    for (std::size_t vi = 0; vi < results.size(); ++vi) {
        double mean = 0.0, tail = 0.0;
        for (const auto& r : results[vi]) {
            mean += r.metrics.eitae;
            const auto& t = r.metrics.segment_tail_error;
            tail += t.empty() ? 0.0
                              : std::accumulate(t.begin(), t.end(), 0.0) /
                                    static_cast<double>(t.size());
            any_halt = any_halt || !r.completed;
        }
        mean /= static_cast<double>(results[vi].size());
        tail /= static_cast<double>(results[vi].size());
        double var = 0.0;
        for (const auto& r : results[vi]) {
            const double d = r.metrics.eitae - mean;
            var += d * d;
        }
        var = results[vi].size() > 1
                  ? var / static_cast<double>(results[vi].size() - 1)
                  : 0.0;
        std::string win = "-";
        if (vi > 0) {
            int wins = 0;
            for (std::size_t s = 0; s < opts.seeds.size(); ++s) {
                if (results[vi][s].metrics.eitae < results[0][s].metrics.eitae) {
                    ++wins;
                }
            }
            win = fmt(static_cast<double>(wins) /
                      static_cast<double>(opts.seeds.size()));
        }
        std::snprintf(buf, sizeof buf, "%-12s %14s %14s %14s %10s\n",
                      opts.variants[vi].c_str(), fmt(mean).c_str(),
                      fmt(std::sqrt(var)).c_str(), fmt(tail).c_str(), win.c_str());
        body += buf;
    }

    fs::create_directories(opts.out_dir);
    write_file(opts.out_dir + "/compare.txt", body);
    RunManifest manifest{preset->id, opts.seeds.front(), {}};
    manifest.files.emplace_back("compare.txt", digest_hex(body));
    manifest.write(opts.out_dir + "/manifest.txt");
    log << body;
    return any_halt ? kExitDivergence : kExitOk;
}

std::vector<double> parse_lambda_grid(const std::string& spec) {
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        double start = 0.0, stop = 0.0, step = 0.0;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
            step <= 0.0) {
            throw ConfigError("lambda grid '" + spec +
                              "': expected start:stop:step with step > 0");
        }
        for (double v = start; v <= stop + 1e-12; v += step) grid.push_back(v);
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0') {
                throw ConfigError("lambda grid '" + spec + "': bad number '" +
                                  tok + "'");
            }
            grid.push_back(v);
        }
    }
    if (grid.empty()) {
        throw ConfigError("lambda grid '" + spec + "': empty");
    }
    return grid;
}

int cmd_poles(const PolesOptions& opts, std::ostream& log) {
    PGVector phi({1, 1, 0, 0}, {0.0, 0.0});
    std::string experiment;
    std::vector<double> grid;
    try {
        grid = parse_lambda_grid(opts.lambda_grid);
        if (!opts.preset.empty()) {
            const ExperimentPreset preset = make_example(opts.preset);
            const auto* lin =
                std::get_if<LinearRegime>(&preset.plant.regimes().front().spec);
            if (lin == nullptr) {
                throw ConfigError("preset '" + opts.preset +
                                  "' has no linear first regime");
            }
            const Orders o{static_cast<int>(std::max<std::size_t>(lin->a.degree(), 1)),
                           static_cast<int>(lin->b.degree()) + 1, 0, 0};
            phi = darma_to_pg(lin->a, lin->b, o);
            experiment = preset.id;
        } else if (!opts.coeff_path.empty()) {
            const KeyValueConfig cfg = KeyValueConfig::parse_file(opts.coeff_path);
            const std::vector<double> py = cfg.get_doubles("phi.y");
            const std::vector<double> pu = cfg.get_doubles("phi.u");
            std::vector<double> values = py;
            values.insert(values.end(), pu.begin(), pu.end());
            phi = PGVector({static_cast<int>(py.size()),
                            static_cast<int>(pu.size()), 0, 0},
                           std::move(values));
            experiment = fs::path(opts.coeff_path).stem().string();
        } else {
            throw ConfigError("either a preset id or a coefficient file is required");
        }
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    std::string body = "lambda | roots (z-plane) | verdict\n";
    std::vector<SvgRootGroup> groups;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Polynomial t = char_poly_basic(phi, grid[i]);
        const auto roots = poly_roots(t);
        body += fmt(grid[i]) + " |";
        for (const auto& z : roots) {
            body += " " + fmt(z.real());
            if (z.imag() != 0.0) body += (z.imag() > 0 ? "+" : "") + fmt(z.imag()) + "i";
        }
        body += std::string(" | ") + (is_stable(t) ? "stable" : "unstable") + "\n";
        groups.push_back({grid.size() <= 8 ? "lambda=" + fmt(grid[i]) : "",
                          kPalette[i % 10], roots});
    }

    fs::create_directories(opts.out_dir);
    write_file(opts.out_dir + "/poles.txt", body);
    RunManifest manifest{experiment, 0, {}};
    manifest.files.emplace_back("poles.txt", digest_hex(body));
    if (!opts.no_plots) {
        const std::string svg = svg_root_locus("Closed-loop roots", groups);
        write_file(opts.out_dir + "/poles.svg", svg);
        manifest.files.emplace_back("poles.svg", digest_hex(svg));
    }
    manifest.write(opts.out_dir + "/manifest.txt");
    log << body;
    return kExitOk;
}

}  // namespace mfac
