#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfac/cli.hpp"
#include "mfac/config.hpp"

using namespace mfac;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("mfac_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

const char* kSampleConfig = R"(
# constant-disturbance switching plant, lambda controller
horizon = 120
seed = 1

reference.amplitude = 5
reference.half_period = 80

plant.regime1.k_end = 60
plant.regime1.a = 1 0.4
plant.regime1.b = -0.5 -0.6
plant.regime2.k_end = 120
plant.regime2.a = 1 -0.4
plant.regime2.b = 0.5 0.6

noise.kind = schedule
noise.schedule = 60:1,120:2

controller.variant = lambda
controller.ly = 1
controller.lu = 2
controller.lambda = 0.2

estimator.kind = projection
estimator.eta = 1
estimator.mu = 1

init.phi = -0.1 -0.1 -0.1
init.y = 0 0 0 0.5 0.2
init.u = 0
)";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("key-value parsing: comments, errors name the key") {
    const KeyValueConfig cfg = KeyValueConfig::parse_string(
        "a.b = 3.5  # trailing comment\nflag = true\nlist = 1 2 3\n");
    CHECK(cfg.get_double("a.b") == doctest::Approx(3.5));
    CHECK(cfg.get_bool("flag", false));
    CHECK(cfg.get_doubles("list") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(cfg.get_double("missing", 7.0) == 7.0);

    CHECK_THROWS_WITH_AS(cfg.get_double("missing"),
                         "missing config key 'missing'", ConfigError);
    CHECK_THROWS_AS(cfg.get_double("flag"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse_string("no equals sign"), ConfigError);
}

TEST_CASE("experiment config from file") {
    const fs::path dir = fresh_dir("cfg");
    write(dir / "exp.cfg", kSampleConfig);
    const ExperimentConfig cfg = experiment_from_config((dir / "exp.cfg").string());
    CHECK(cfg.horizon == 120);
    CHECK(cfg.controller.lambda == doctest::Approx(0.2));
    CHECK(cfg.plant.regimes().size() == 2);
    CHECK(cfg.noise.kind == DisturbanceSpec::Kind::constant_schedule);
    CHECK(cfg.phi0 == std::vector<double>{-0.1, -0.1, -0.1});

    const RunResult r = run_experiment(cfg);
    CHECK(r.completed);
    fs::remove_all(dir);
}

TEST_CASE("experiment config errors carry the offending key") {
    const fs::path dir = fresh_dir("cfgbad");
    write(dir / "bad.cfg", "horizon = 10\n");
    try {
        experiment_from_config((dir / "bad.cfg").string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("controller.ly") != std::string::npos);
    }

    std::string broken = kSampleConfig;
    broken += "\ncontroller.lambda = fast\n";
    write(dir / "broken.cfg", broken);
    try {
        experiment_from_config((dir / "broken.cfg").string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("controller.lambda") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("cmd_run writes the full artifact set and is deterministic") {
    const fs::path d1 = fresh_dir("run1");
    const fs::path d2 = fresh_dir("run2");
    std::ostringstream log;

    CHECK(cmd_run({"ex1", "", 0, d1.string(), false}, log) == kExitOk);
    for (const char* name : {"trace.csv", "metrics.txt", "tracking.svg",
                             "input.svg", "pg.svg", "manifest.txt"}) {
        CHECK(fs::exists(d1 / name));
    }
    // exactly 1 csv + 3 svg + metrics + manifest
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(d1)) {
        (void)entry;
        ++count;
    }
    CHECK(count == 6);

    CHECK(cmd_run({"ex1", "", 0, d2.string(), false}, log) == kExitOk);
    const RunManifest m1 = RunManifest::read((d1 / "manifest.txt").string());
    const RunManifest m2 = RunManifest::read((d2 / "manifest.txt").string());
    REQUIRE(m1.files.size() == m2.files.size());
    for (std::size_t i = 0; i < m1.files.size(); ++i) {
        CHECK(m1.files[i] == m2.files[i]);
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("cmd_run: no-plots flag and config errors") {
    const fs::path dir = fresh_dir("runflags");
    std::ostringstream log;
    CHECK(cmd_run({"ex2-case2", "", 0, dir.string(), true}, log) == kExitOk);
    CHECK_FALSE(fs::exists(dir / "tracking.svg"));
    CHECK(fs::exists(dir / "trace.csv"));

    CHECK(cmd_run({"ex99", "", 0, dir.string(), false}, log) == kExitConfigError);
    CHECK(cmd_run({"", "", 0, dir.string(), false}, log) == kExitConfigError);
    fs::remove_all(dir);
}

TEST_CASE("cmd_run reports divergence with a partial trace") {
    const fs::path dir = fresh_dir("diverge");
    write(dir / "bad.cfg", R"(
horizon = 400
reference.amplitude = 1
reference.half_period = 400
plant.regime1.k_end = 400
plant.regime1.a = 1 -2
plant.regime1.b = 1
controller.variant = basic
controller.ly = 1
controller.lu = 1
estimator.kind = frozen
init.phi = 0 -1
)");
    std::ostringstream log;
    CHECK(cmd_run({"", (dir / "bad.cfg").string(), 0, dir.string(), true},
                  log) == kExitDivergence);
    CHECK(log.str().find("halted") != std::string::npos);
    std::ifstream in(dir / "trace.csv");
    REQUIRE(in.good());
    const auto rows = read_trace_csv(in);
    CHECK(!rows.empty());
    CHECK(rows.size() < 400);
    fs::remove_all(dir);
}

TEST_CASE("cmd_run on ex3 reports both controller variants") {
    const fs::path dir = fresh_dir("runex3");
    std::ostringstream log;
    CHECK(cmd_run({"ex3", "", 0, dir.string(), true}, log) == kExitOk);
    std::ifstream in(dir / "metrics.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string metrics = ss.str();
    CHECK(metrics.find("poly") != std::string::npos);
    CHECK(metrics.find("lambda") != std::string::npos);
    CHECK(metrics.find("eITAE") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cmd_compare: arity checks, table, degenerate single seed") {
    const fs::path dir = fresh_dir("compare");
    std::ostringstream log;
    CHECK(cmd_compare({"ex3", {"poly"}, {0}, dir.string()}, log) ==
          kExitConfigError);
    CHECK(cmd_compare({"ex3", {"poly", "lambda"}, {}, dir.string()}, log) ==
          kExitConfigError);
    CHECK(cmd_compare({"ex3", {"poly", "nope"}, {0}, dir.string()}, log) ==
          kExitConfigError);

    CHECK(cmd_compare({"ex3", {"poly", "lambda"}, {0, 1, 2}, dir.string()}, log) ==
          kExitOk);
    CHECK(fs::exists(dir / "compare.txt"));
    const std::string body = log.str();
    CHECK(body.find("win rate") != std::string::npos);

    std::ostringstream single_log;
    CHECK(cmd_compare({"ex3", {"poly", "lambda"}, {0}, dir.string()},
                      single_log) == kExitOk);
    CHECK(single_log.str().find("win rate") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cmd_compare shows the baseline's larger steady-state error") {
    const fs::path dir = fresh_dir("comparemvc");
    std::ostringstream log;
    REQUIRE(cmd_compare({"ex1", {"basic", "mvc"}, {0}, dir.string()}, log) ==
            kExitOk);
    // tail |e| column: the minimum-variance baseline sits above the
    // incremental controller
    double tail_basic = -1.0, tail_mvc = -1.0;
    std::stringstream ss(log.str());
    std::string line;
    while (std::getline(ss, line)) {
        std::stringstream row(line);
        std::string name, mean, stddev, tail;
        row >> name >> mean >> stddev >> tail;
        if (name == "basic") tail_basic = std::strtod(tail.c_str(), nullptr);
        if (name == "mvc") tail_mvc = std::strtod(tail.c_str(), nullptr);
    }
    REQUIRE(tail_basic >= 0.0);
    REQUIRE(tail_mvc >= 0.0);
    CHECK(tail_mvc > tail_basic);
    fs::remove_all(dir);
}

TEST_CASE("lambda grid parsing") {
    CHECK(parse_lambda_grid("0.5") == std::vector<double>{0.5});
    CHECK(parse_lambda_grid("0.1,0.2,0.3") ==
          std::vector<double>{0.1, 0.2, 0.3});
    const auto grid = parse_lambda_grid("0.01:0.05:0.01");
    REQUIRE(grid.size() == 5);
    CHECK(grid.front() == doctest::Approx(0.01));
    CHECK(grid.back() == doctest::Approx(0.05));
    CHECK_THROWS_AS(parse_lambda_grid("1:0:-1"), ConfigError);
    CHECK_THROWS_AS(parse_lambda_grid("abc"), ConfigError);
}

TEST_CASE("cmd_poles: single value, preset grid, verdict column") {
    const fs::path dir = fresh_dir("poles");
    std::ostringstream log;
    CHECK(cmd_poles({"ex2-case1", "", "0.2", dir.string(), false}, log) ==
          kExitOk);
    CHECK(fs::exists(dir / "poles.txt"));
    CHECK(fs::exists(dir / "poles.svg"));
    {
        std::ifstream in(dir / "poles.txt");
        std::string header, row, extra;
        std::getline(in, header);
        std::getline(in, row);
        CHECK_FALSE(std::getline(in, extra));  // single lambda, single row
        CHECK(row.find("stable") != std::string::npos);
    }

    std::ostringstream sweep_log;
    CHECK(cmd_poles({"ex2-case1", "", "0.01:1:0.01", dir.string(), true},
                    sweep_log) == kExitOk);
    std::size_t rows = 0, verdicts = 0;
    std::ifstream in(dir / "poles.txt");
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        ++rows;
        if (line.find("stable") != std::string::npos) ++verdicts;
    }
    CHECK(rows == 100);
    CHECK(verdicts == rows);

    CHECK(cmd_poles({"", "", "0.1", dir.string(), false}, log) ==
          kExitConfigError);
    CHECK(cmd_poles({"nl", "", "0.1", dir.string(), false}, log) ==
          kExitConfigError);
    fs::remove_all(dir);
}

TEST_CASE("cmd_poles accepts a coefficient file") {
    const fs::path dir = fresh_dir("polescfg");
    write(dir / "phi.cfg", "phi.y = -0.4\nphi.u = -0.5 -0.6\n");
    std::ostringstream log;
    CHECK(cmd_poles({"", (dir / "phi.cfg").string(), "0,0.2", dir.string(),
                     false}, log) == kExitOk);
    const std::string body = log.str();
    CHECK(body.find("0.2 |") != std::string::npos);
    fs::remove_all(dir);
}

}  // TEST_SUITE
