// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbmcmimo/cli.hpp"
#include "fbmcmimo/errors.hpp"
#include "fbmcmimo/reports.hpp"
#include "fbmcmimo/scenario_io.hpp"

using namespace fbmcmimo;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("fbmcsim_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_scenario(const fs::path& dir, const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << body;
    return p;
}

const char* kMinimal = "[array]\nM = 128\nK = 6\n\n[fbmc]\nL = 64\n";

Scenario tiny_selfeq_scenario() {
    return parse_scenario_text(
        "[fbmc]\nL = 16\nsymbols = 32\n"
        "[channel]\npdp = exponential\ntaps = 4\ndecay = 2.0\n"
        "[array]\nM = 4\nK = 2\n"
        "[run]\nsnr_in_db = 5\ntrials = 4\nseed = 3\n");
}

}  // namespace

TEST_CASE("minimal scenario file gets the documented defaults") {
    const Scenario s = parse_scenario_text(kMinimal);
    CHECK(s.fbmc.num_subcarriers == 64);
    CHECK(s.fbmc.overlap_factor == 4);
    CHECK(s.fbmc.num_symbols == 64);
    CHECK(s.fbmc.pam_order == 2);
    CHECK(s.num_antennas == 128);
    CHECK(s.num_users == 6);
    CHECK(s.pdp.tap_delays.size() == 8);
    CHECK(s.snr_in_db == 0.0);
    CHECK(s.trials == 100);
    CHECK(s.seed == 1);
    CHECK(s.experiment == ExperimentKind::self_equalization);
    CHECK_FALSE(s.contamination.has_value());
    CHECK_FALSE(s.blind.has_value());
}

TEST_CASE("semantic and strict-parse errors") {
    CHECK_THROWS_WITH_AS(parse_scenario_text("[fbmc]\nL = 60\n"),
                         doctest::Contains("L must be a power of two"), ParseError);
    CHECK_THROWS_WITH_AS(parse_scenario_text("[fbmc]\ncp_length = 16\n"),
                         doctest::Contains("fbmc.cp_length"), ParseError);
    CHECK_THROWS_WITH_AS(parse_scenario_text("[modem]\nL = 64\n"),
                         doctest::Contains("unknown section"), ParseError);
    CHECK_THROWS_WITH_AS(parse_scenario_text("[fbmc]\nL 64\n"), doctest::Contains("line 2"),
                         ParseError);
    CHECK_THROWS_AS(parse_scenario_text("[fbmc]\nL = sixty\n"), ParseError);
    CHECK_THROWS_AS(parse_scenario_text("[fbmc]\nL = 16\nL = 32\n"), ParseError);
    // blind_tracking without its sections is inconsistent
    CHECK_THROWS_AS(parse_scenario_text("[run]\nexperiment = blind_tracking\n"), ParseError);
    CHECK_THROWS_AS(parse_scenario(fs::path("/no/such/file.scenario")), ParseError);
}

TEST_CASE("custom pdp, contamination and blind blocks parse") {
    const Scenario s = parse_scenario_text(
        "[fbmc]\nL = 32\nsymbols = 96\n"
        "[channel]\npdp = custom\ndelays = 0,2,5\npowers = 0.5,0.3,0.2\n"
        "[array]\nM = 16\nK = 1\n"
        "[contamination]\ncells = 3\ncross_gain = 0.25\nshared_pilots = true\n"
        "[blind]\nmu = 0.002\niterations = 40\nblock_size = 16\n"
        "[run]\nexperiment = blind_tracking\nsnr_in_db = 0\ntrials = 5\nseed = 11\n");
    CHECK(s.pdp.tap_delays == std::vector<int>{0, 2, 5});
    REQUIRE(s.contamination.has_value());
    CHECK(s.contamination->num_cells == 3);
    CHECK(s.contamination->cross_gains == std::vector<double>{0.25, 0.25});
    REQUIRE(s.blind.has_value());
    CHECK(s.blind->step_size == 0.002);
    CHECK(s.blind->iterations == 40);
}

TEST_CASE("canonical form re-parses to an equal scenario") {
    for (const Scenario& s : {tiny_selfeq_scenario(), [] {
             Scenario t = parse_scenario_text(
                 "[fbmc]\nL = 16\nsymbols = 64\n"
                 "[array]\nM = 8\nK = 1\n"
                 "[contamination]\ncells = 3\ncross_gain = 0.3\n"
                 "[blind]\nmu = 0.001\niterations = 10\n"
                 "[run]\nexperiment = blind_tracking\ntrials = 2\nseed = 5\n");
             return t;
         }()}) {
        const std::string canon = canonical_scenario_text(s);
        const Scenario back = parse_scenario_text(canon);
        CHECK(back == s);
        CHECK(canonical_scenario_text(back) == canon);
    }
}

TEST_CASE("sinr report bundle: shapes, determinism, round-trip") {
    const Scenario s = tiny_selfeq_scenario();
    const SinrReport report = run_self_equalization(s);

    const fs::path d1 = temp_dir("bundle1");
    const fs::path d2 = temp_dir("bundle2");
    const ReportBundle b1 = write_reports(report, d1, true);
    const ReportBundle b2 = write_reports(report, d2, true);
    REQUIRE(!b1.files.empty());

    for (std::size_t i = 0; i < b1.files.size(); ++i) {
        CHECK(slurp(b1.files[i]) == slurp(b2.files[i]));  // byte-identical
    }

    const CsvTable t = read_csv(d1 / "curve_sinr_mmse_mean.csv");
    REQUIRE(t.header.size() == 4);
    CHECK(t.header[0] == "subcarrier_index");
    CHECK(t.header[1] == "value_db");
    CHECK(t.rows.size() == static_cast<std::size_t>(s.fbmc.num_subcarriers));
    for (std::size_t l = 0; l < t.rows.size(); ++l) {
        CHECK(std::stoul(t.rows[l][0]) == l);
        // 17 significant digits round-trip exactly
        CHECK(std::stod(t.rows[l][1]) == report.ensemble_mean_db[SinrReport::kMmse][l]);
        CHECK(t.rows[l][2] == "mmse");
        CHECK(t.rows[l][3] == "ensemble_mean");
    }
    CHECK(fs::exists(d1 / "curve_sinr_mmse_mean.svg"));
    CHECK(fs::exists(d1 / "summary.json"));
    CHECK(slurp(d1 / "summary.json").find("fbmc-mimo-sim") != std::string::npos);

    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("tracking bundle: iteration column plus three constant baselines") {
    Scenario s = parse_scenario_text(
        "[fbmc]\nL = 16\nsymbols = 96\n"
        "[channel]\npdp = exponential\ntaps = 4\ndecay = 2.0\n"
        "[array]\nM = 8\nK = 1\n"
        "[contamination]\ncells = 3\ncross_gain = 0.3\n"
        "[blind]\nmu = 0.001\niterations = 10\nblock_size = 32\n"
        "[run]\nexperiment = blind_tracking\nsnr_in_db = 0\ntrials = 3\nseed = 2\n");
    const TrackingReport report = run_blind_tracking(s);
    const fs::path dir = temp_dir("tracking");
    write_reports(report, dir, false);

    const CsvTable t = read_csv(dir / "curve_tracking_median.csv");
    REQUIRE(t.header.size() == 7);
    CHECK(t.header[0] == "iteration");
    CHECK(t.header[4] == "mf_noisy_db");
    CHECK(t.header[5] == "mf_clean_db");
    CHECK(t.header[6] == "mmse_clean_db");
    REQUIRE(t.rows.size() == 10);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(std::stoul(t.rows[i][0]) == i);
        CHECK(std::stod(t.rows[i][4]) == report.median_mf_noisy_db);
        CHECK(std::stod(t.rows[i][5]) == report.median_mf_clean_db);
        CHECK(std::stod(t.rows[i][6]) == report.median_mmse_clean_db);
    }
    fs::remove_all(dir);
}

TEST_CASE("sweep bundle records failed points without aborting") {
    Scenario s = tiny_selfeq_scenario();
    const SweepReport sweep = run_sweep(s, SweepAxis::num_subcarriers, {16.0, 12.0});
    const fs::path dir = temp_dir("sweep");
    write_reports(sweep, dir, false);
    const std::string summary = slurp(dir / "summary.json");
    CHECK(summary.find("\"failures\"") != std::string::npos);
    CHECK(summary.find("power of two") != std::string::npos);
    CHECK(fs::exists(dir / "point_L_16" / "summary.json"));
    CHECK_FALSE(fs::exists(dir / "point_L_12"));
    fs::remove_all(dir);
}

TEST_CASE("cli: validate, run determinism, exit codes") {
    const fs::path dir = temp_dir("cli");
    const fs::path good = write_scenario(dir, "good.scenario",
                                         "[fbmc]\nL = 16\nsymbols = 32\n"
                                         "[channel]\npdp = flat\n"
                                         "[array]\nM = 2\nK = 1\n"
                                         "[run]\nsnr_in_db = 10\ntrials = 2\nseed = 1\n");
    const fs::path bad = write_scenario(dir, "bad.scenario", "[fbmc]\nL = 60\n");

    CHECK(cli_main({"validate", good.string()}) == 0);
    CHECK(cli_main({"validate", bad.string()}) == 1);
    CHECK(cli_main({"frobnicate", good.string()}) == 1);
    CHECK(cli_main({}) == 1);

    const fs::path out1 = dir / "r1";
    const fs::path out2 = dir / "r2";
    CHECK(cli_main({"run", good.string(), "--out", out1.string(), "--seed", "7"}) == 0);
    CHECK(cli_main({"run", good.string(), "--out", out2.string(), "--seed", "7"}) == 0);
    for (const auto& entry : fs::directory_iterator(out1)) {
        const fs::path rel = entry.path().filename();
        CHECK(slurp(out1 / rel) == slurp(out2 / rel));
    }
    CHECK(fs::exists(out1 / "summary.json"));

    const fs::path out3 = dir / "r3";
    CHECK(cli_main({"sweep", good.string(), "--axis", "M", "--values", "1,2", "--out",
                    out3.string()}) == 0);
    CHECK(fs::exists(out3 / "summary.json"));
    CHECK(fs::exists(out3 / "point_M_1" / "summary.json"));

    // runtime failures (not validation) exit with 2
    const fs::path diverging = write_scenario(dir, "diverging.scenario",
                                              "[fbmc]\nL = 16\nsymbols = 64\n"
                                              "[channel]\npdp = flat\n"
                                              "[array]\nM = 4\nK = 1\n"
                                              "[contamination]\ncells = 2\ncross_gain = 0.3\n"
                                              "[blind]\nmu = 1.0\niterations = 300\n"
                                              "[run]\nexperiment = blind_tracking\n"
                                              "snr_in_db = 0\ntrials = 1\nseed = 1\n");
    CHECK(cli_main({"validate", diverging.string()}) == 0);
    CHECK(cli_main({"run", diverging.string(), "--out", (dir / "r4").string()}) == 2);

    fs::remove_all(dir);
}

TEST_CASE("FBMCSIM_OUT sets the default output directory") {
    const fs::path dir = temp_dir("envout");
    const fs::path good = write_scenario(dir, "env.scenario",
                                         "[fbmc]\nL = 16\nsymbols = 32\n"
                                         "[channel]\npdp = flat\n"
                                         "[array]\nM = 2\nK = 1\n"
                                         "[run]\nsnr_in_db = 10\ntrials = 1\nseed = 1\n");
    const fs::path out = dir / "from_env";
    setenv("FBMCSIM_OUT", out.string().c_str(), 1);
    CHECK(cli_main({"run", good.string()}) == 0);
    unsetenv("FBMCSIM_OUT");
    CHECK(fs::exists(out / "summary.json"));
    fs::remove_all(dir);
}

TEST_CASE("unwritable output directory fails without leaving temp files") {
    const fs::path dir = temp_dir("unwritable");
    const fs::path blocker = dir / "blocker";
    std::ofstream(blocker) << "x";  // a file where the output dir should go

    const Scenario s = tiny_selfeq_scenario();
    const SinrReport report = run_self_equalization(s);
    CHECK_THROWS(write_reports(report, blocker / "sub", false));
    CHECK_THROWS(write_reports(report, blocker, false));
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        CHECK(e.path().extension() != ".tmp");
    }
    fs::remove_all(dir);
}
