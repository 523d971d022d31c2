#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "deltalap/config.hpp"
#include "deltalap/errors.hpp"
#include "deltalap/experiments.hpp"
#include "deltalap/report.hpp"

namespace {

// exit status: 0 all checks pass, 1 runtime error, 2 invalid configuration, 3 some check failed
constexpr int exit_runtime = 1;
constexpr int exit_config = 2;
constexpr int exit_failed = 3;

int thread_cap()
{
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1)
        n = 1;
    if (const char* env = std::getenv("DELTALAP_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v >= 1)
                return v;
        } catch (const std::exception&) {
        }
        throw deltalap::ConfigError(std::string("DELTALAP_THREADS must be a positive integer, got '") + env + "'");
    }
    return n;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Point interaction Laplacian experiments"};
    std::string experiment, config_path, out_dir = "deltalap_out";
    std::vector<std::string> sets;
    bool quiet = false;
    app.add_option("experiment", experiment, "greens | frac | decompose | embed | dispersive | strichartz | nls | verify-all")
        ->required();
    app.add_option("--config", config_path, "TOML or JSON configuration file");
    app.add_option("--set", sets, "override a configuration value, key=value (repeatable)");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("-q,--quiet", quiet, "print only the summary line");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    deltalap::ExperimentConfig cfg;
    int threads = 1;
    try {
        cfg = deltalap::load_config(experiment, config_path, sets);
        threads = thread_cap();
    } catch (const deltalap::ConfigError& e) {
        std::cerr << "deltalap: invalid configuration: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "deltalap: invalid configuration: " << e.what() << "\n";
        return exit_config;
    }

    deltalap::RunOutput out;
    try {
        out = deltalap::run_experiment(cfg, threads);
        deltalap::write_outputs(out_dir, cfg, out);
    } catch (const std::exception& e) {
        std::cerr << "deltalap: " << e.what() << "\n";
        return exit_runtime;
    }

    int passed = 0;
    for (const auto& c : out.checks) {
        passed += c.pass;
        if (!quiet)
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  measured=" << deltalap::format_number(c.measured)
                      << "\n";
    }
    for (const auto& e : out.errors)
        std::cerr << "deltalap: " << e << "\n";
    std::cout << cfg.experiment << ": " << passed << "/" << out.checks.size() << " checks passed, " << out.errors.size()
              << " errors; report in " << out_dir << "/report.json\n";
    if (!out.errors.empty())
        return exit_runtime;
    return out.all_pass() ? 0 : exit_failed;
}
