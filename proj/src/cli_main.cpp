// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/cli.hpp"

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "fbmcmimo/errors.hpp"
#include "fbmcmimo/reports.hpp"
#include "fbmcmimo/scenario_io.hpp"
#include "fbmcmimo/version.hpp"

namespace fbmcmimo {

namespace {

std::string default_out_dir() {
    if (const char* env = std::getenv("FBMCSIM_OUT")) return env;
    return "out";
}

struct CommonOpts {
    std::string scenario_path;
    std::string out_dir = default_out_dir();
    bool plot = false;
    long long seed_override = -1;
    int threads = 0;
};

Scenario load(const CommonOpts& opts) {
    Scenario s = parse_scenario(opts.scenario_path);
    if (opts.seed_override >= 0) {
        s.seed = static_cast<std::uint64_t>(opts.seed_override);
    }
    return s;
}

int run_command(const CommonOpts& opts) {
    const Scenario s = load(opts);
    std::cerr << "fbmcsim: running "
              << (s.experiment == ExperimentKind::self_equalization ? "self_equalization"
                                                                    : "blind_tracking")
              << " (L=" << s.fbmc.num_subcarriers << ", M=" << s.num_antennas
              << ", K=" << s.num_users << ", trials=" << s.trials << ", seed=" << s.seed << ")\n";
    ReportBundle bundle;
    if (s.experiment == ExperimentKind::self_equalization) {
        bundle = write_reports(run_self_equalization(s, opts.threads), opts.out_dir, opts.plot);
    } else {
        bundle = write_reports(run_blind_tracking(s, opts.threads), opts.out_dir, opts.plot);
    }
    std::cerr << "fbmcsim: wrote " << bundle.files.size() << " files to " << opts.out_dir << "\n";
    return 0;
}

int sweep_command(const CommonOpts& opts, const std::string& axis_name,
                  const std::vector<double>& values) {
    const Scenario s = load(opts);
    const SweepAxis axis = sweep_axis_from_string(axis_name);
    std::cerr << "fbmcsim: sweeping " << axis_name << " over " << values.size() << " points\n";
    const SweepReport sweep = run_sweep(s, axis, values, opts.threads);
    const ReportBundle bundle = write_reports(sweep, opts.out_dir, opts.plot);
    int failed = 0;
    for (const SweepPoint& p : sweep.points) {
        if (p.failed()) {
            ++failed;
            std::cerr << "fbmcsim: point " << axis_name << "=" << p.value
                      << " failed: " << p.error << "\n";
        }
    }
    std::cerr << "fbmcsim: wrote " << bundle.files.size() << " files to " << opts.out_dir
              << (failed ? (" (" + std::to_string(failed) + " failed points)") : "") << "\n";
    return 0;
}

int validate_command(const CommonOpts& opts) {
    load(opts);
    std::cout << "OK\n";
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{std::string(kVersion) + " - FBMC massive MIMO uplink simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string axis_name;
    std::vector<double> values;

    CLI::App* run = app.add_subcommand("run", "run a scenario and write its report bundle");
    run->add_option("scenario", opts.scenario_path, "scenario file")->required();
    run->add_option("--out", opts.out_dir, "output directory");
    run->add_flag("--plot", opts.plot, "also write SVG line plots");
    run->add_option("--seed", opts.seed_override, "override the scenario seed");
    run->add_option("--threads", opts.threads, "worker threads (0 = auto)");

    CLI::App* sweep = app.add_subcommand("sweep", "run a scenario along one axis");
    sweep->add_option("scenario", opts.scenario_path, "scenario file")->required();
    sweep->add_option("--axis", axis_name, "M, L, snr_in_db or beta")->required();
    sweep->add_option("--values", values, "comma-separated axis values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--out", opts.out_dir, "output directory");
    sweep->add_flag("--plot", opts.plot, "also write SVG line plots");
    sweep->add_option("--seed", opts.seed_override, "override the scenario seed");
    sweep->add_option("--threads", opts.threads, "worker threads (0 = auto)");

    CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("scenario", opts.scenario_path, "scenario file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "fbmcsim: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (app.got_subcommand(run)) return run_command(opts);
        if (app.got_subcommand(sweep)) return sweep_command(opts, axis_name, values);
        if (app.got_subcommand(validate)) return validate_command(opts);
        std::cerr << app.help();
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "fbmcsim: scenario error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "fbmcsim: configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fbmcsim: runtime error: " << e.what() << "\n";
        return 2;
    }
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? argc - 1 : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args);
}

}  // namespace fbmcmimo
