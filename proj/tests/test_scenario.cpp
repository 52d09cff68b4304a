#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gogrow/errors.hpp"
#include "gogrow/scenario.hpp"
#include "gogrow/waves.hpp"

using namespace gog;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("gogrow_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string body_of(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line.front() != '#') out += line + "\n";
    return out;
}

std::vector<std::vector<double>> rows_of(const std::string& csv) {
    std::istringstream in(body_of(csv));
    std::string line;
    std::getline(in, line);  // column names
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> r;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
        rows.push_back(r);
    }
    return rows;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(ParseConfig, MinimalFileUsesDefaults) {
    const Scenario s = parse_config("kind = wave_table\n");
    const Scenario d;
    EXPECT_EQ(s.kind, ScenarioKind::WaveTable);
    EXPECT_EQ(s.grid, d.grid);
    EXPECT_EQ(s.scheme, d.scheme);
    EXPECT_EQ(s.chi_values, d.chi_values);
    EXPECT_EQ(parse_config(""), d);
}

TEST(ParseConfig, ValuesSectionsAndComments) {
    const Scenario s = parse_config(
        "name = demo   # trailing comment\n"
        "kind = parabolic_run\n"
        "[model]\n"
        "chi = 2.0\n"
        "chi_values = 0.5, 2\n"
        "[grid]\n"
        "dz = 0.1\n"
        "[scheme]\n"
        "advection = central2\n"
        "levels = 3\n"
        "[output]\n"
        "dir = results\n"
        "snapshot_times = 1, 2.5\n");
    EXPECT_EQ(s.name, "demo");
    EXPECT_EQ(s.params.chi, 2.0);
    EXPECT_EQ(s.chi_values, (std::vector<double>{0.5, 2.0}));
    EXPECT_EQ(s.grid.dz, 0.1);
    EXPECT_EQ(s.scheme.advection, "central2");
    EXPECT_EQ(s.scheme.levels, 3);
    EXPECT_EQ(s.output_dir, "results");
    EXPECT_EQ(s.snapshot_times, (std::vector<double>{1.0, 2.5}));
}

TEST(ParseConfig, Errors) {
    const std::string dup = message_of([] { parse_config("[model]\nchi = 1\n\nchi = 2\n"); });
    EXPECT_NE(dup.find("duplicate key 'chi'"), std::string::npos);
    EXPECT_NE(dup.find("lines 2 and 4"), std::string::npos);

    const std::string unknown = message_of([] { parse_config("[model]\nchii = 1\n"); });
    EXPECT_NE(unknown.find("line 2"), std::string::npos);
    EXPECT_NE(unknown.find("chii"), std::string::npos);

    EXPECT_NE(message_of([] { parse_config("[nope]\n"); }).find("line 1"), std::string::npos);
    EXPECT_NE(message_of([] { parse_config("[grid]\ndz = abc\n"); }).find("line 2"), std::string::npos);
    EXPECT_NE(message_of([] { parse_config("kind = nope\n"); }), "");
    EXPECT_NE(message_of([] { parse_config("just text\n"); }).find("line 1"), std::string::npos);
    EXPECT_EQ(message_of([] { parse_config("[model]\nchi = -1\n"); }), "chi must be positive");
    EXPECT_NE(message_of([] { parse_config("[scheme]\ntheta = 0.2\n"); }), "");
    // the same value is accepted when validation is deferred
    EXPECT_EQ(parse_config("[model]\nchi = -1\n", false).params.chi, -1.0);
}

TEST(ParseConfig, RoundTripIsExact) {
    Scenario s;
    s.name = "round";
    s.kind = ScenarioKind::SpeedSweep;
    s.params.chi = 1.0 / 3.0;
    s.params.epsilon = 0.1234567890123456789;
    s.chi_values = {0.1, 2.0 / 3.0, 7.0};
    s.dynamics = "kinetic";
    s.grid = {-12.5, 77.25, 0.03};
    s.scheme.dt = 1e-3 / 3.0;
    s.scheme.levels = 2;
    s.scheme.advection = "central2";
    s.snapshot_times = {0.1, 0.3};
    const std::string text = to_config_text(s);
    const Scenario back = parse_config(text);
    EXPECT_EQ(back, s);
    EXPECT_EQ(to_config_text(back), text);
}

TEST(RunScenario, WaveTableMatchesSpeedFormulas) {
    Scenario s;
    s.output_dir = scratch("wave_table").string();
    s.grid = {-20.0, 60.0, 0.1};
    const ScenarioOutcome r = run_scenario(s);
    ASSERT_EQ(r.exit_code, 0) << r.error;
    const std::string csv = slurp(fs::path(s.output_dir) / "wave_table.csv");
    EXPECT_EQ(csv.front(), '#');
    EXPECT_NE(csv.find(std::string("gogrow ") + kVersion), std::string::npos);
    EXPECT_NE(csv.find("chi = 2"), std::string::npos);
    EXPECT_NE(csv.find("chi,sigma_star,mu_minus,mu_plus\n"), std::string::npos);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    const auto rows = rows_of(csv);
    ASSERT_EQ(rows.size(), 5u);
    for (const auto& row : rows) {
        const double chi = row[0], sigma = chi > 1.0 ? chi + 1.0 / chi : 2.0;
        EXPECT_DOUBLE_EQ(row[1], sigma);
        EXPECT_NEAR(row[2] * row[3], 1.0, 1e-14);
        EXPECT_NEAR(row[2] + row[3], sigma, 1e-14);
        EXPECT_DOUBLE_EQ(row[2], decay_roots(sigma).mu_minus);
    }
    EXPECT_TRUE(fs::exists(fs::path(s.output_dir) / "profile.csv"));
    EXPECT_TRUE(fs::exists(fs::path(s.output_dir) / "kinetic_profile.csv"));
}

TEST(RunScenario, InsidePushedWritesDecayAndSpectrum) {
    Scenario s;
    s.kind = ScenarioKind::InsideRun;
    s.params.chi = 2.0;
    s.grid = {-40.0, 40.0, 0.1};
    s.scheme.dt = 0.05;
    s.scheme.tmax = 10.0;
    s.scheme.sample_interval = 0.5;
    s.output_dir = scratch("inside").string();
    const ScenarioOutcome r = run_scenario(s);
    ASSERT_EQ(r.exit_code, 0) << r.error;
    const std::string decay = slurp(fs::path(s.output_dir) / "decay.csv");
    EXPECT_NE(decay.find("classification=pushed"), std::string::npos);
    EXPECT_TRUE(fs::exists(fs::path(s.output_dir) / "eigen.csv"));
}

TEST(RunScenario, BadConfigExitsWithTwo) {
    Scenario s;
    s.params.chi = -1.0;
    s.output_dir = scratch("bad").string();
    const ScenarioOutcome r = run_scenario(s);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.error.find("chi must be positive"), std::string::npos);
    EXPECT_EQ(r.error.find('\n'), std::string::npos);
    EXPECT_TRUE(r.files.empty());
}

TEST(RunScenario, KineticPreconditionMapsToConfigError) {
    Scenario s;
    s.kind = ScenarioKind::KineticRun;
    s.params.chi = 2.0;
    s.params.epsilon = 0.6;
    s.output_dir = scratch("kin_bad").string();
    EXPECT_EQ(run_scenario(s).exit_code, 2);
}

TEST(RunScenario, OutputsAreDeterministic) {
    Scenario s;
    s.kind = ScenarioKind::ParabolicRun;
    s.params.chi = 2.0;
    s.grid = {-20.0, 40.0, 0.1};
    s.scheme.dt = 0.02;
    s.scheme.tmax = 1.0;
    s.snapshot_times = {0.5};
    std::vector<std::string> bodies;
    for (const char* tag : {"det_a", "det_b"}) {
        s.output_dir = scratch(tag).string();
        const ScenarioOutcome r = run_scenario(s);
        ASSERT_EQ(r.exit_code, 0) << r.error;
        ASSERT_EQ(r.files.size(), 3u);
        std::string all;
        for (const auto& f : r.files) all += body_of(slurp(f));
        bodies.push_back(all);
    }
    EXPECT_EQ(bodies[0], bodies[1]);
    EXPECT_FALSE(bodies[0].empty());
}

#ifdef GOGROW_CLI_PATH
namespace {

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(GOGROW_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST(Cli, ExitCodesAndOverrides) {
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    const fs::path cfg = dir / "s.cfg";
    std::ofstream(cfg) << "kind = wave_table\n[model]\nchi = 2\n[grid]\nz_min = -20\nz_max = 60\ndz = 0.1\n";

    EXPECT_EQ(run_cli("--scenario " + cfg.string() + " --out " + (dir / "out").string(), dir / "log1"), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "wave_table.csv"));

    EXPECT_EQ(run_cli("--scenario " + cfg.string() + " --chi -1", dir / "log2"), 2);
    const std::string err = slurp(dir / "log2");
    EXPECT_NE(err.find("chi must be positive"), std::string::npos);
    EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);

    EXPECT_EQ(run_cli("--scenario " + cfg.string() + " --dz 0.2 --tmax 3 --print-config", dir / "log3"), 0);
    const Scenario printed = parse_config(slurp(dir / "log3"));
    EXPECT_EQ(printed.grid.dz, 0.2);
    EXPECT_EQ(printed.scheme.tmax, 3.0);
    EXPECT_EQ(printed.params.chi, 2.0);

    std::ofstream(dir / "dup.cfg") << "[model]\nchi = 1\nchi = 2\n";
    EXPECT_EQ(run_cli("--scenario " + (dir / "dup.cfg").string(), dir / "log4"), 2);
}
#endif
