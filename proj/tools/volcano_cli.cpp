// volcano: one subcommand per experiment.
//
//   volcano <experiment> [--config FILE] [--out DIR] [--workers N] [--seed S]
//
// Writes manifest.json plus the experiment's CSV/JSON files into DIR.
// Exit status: 0 all checks pass, 1 some check failed, 2 invalid
// configuration or command line, 3 the experiment aborted with an error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "volcano/experiments.hpp"

namespace fs = std::filesystem;
namespace vx = volcano::experiments;

namespace {

enum Exit { kPass = 0, kFail = 1, kBadConfig = 2, kAborted = 3 };

int report_error(int code, const std::string& kind, const std::string& message) {
    const vx::json err = {{"error", {{"type", kind}, {"message", message}, {"exit_code", code}}}};
    std::cerr << err.dump() << '\n';
    return code;
}

vx::json load_config(const std::string& path) {
    if (path.empty()) return vx::json::object();
    std::ifstream in(path);
    if (!in) throw vx::ConfigError("cannot open config file " + path);
    try {
        return vx::json::parse(in);
    } catch (const vx::json::parse_error& e) {
        throw vx::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

const char* describe(const std::string& name) {
    if (name == "special-functions") return "Hankel identities on sheets -1, 0, 1";
    if (name == "modes") return "eigenfunction laws and boundary/ODE residuals";
    if (name == "transform-check") return "Plancherel, round trip and multiplication property";
    if (name == "evolve") return "spectral vs leapfrog evolution and energy drift";
    if (name == "decay") return "graviton and KK brane decay exponents";
    if (name == "resolvent-check") return "Green kernel vs direct solve";
    if (name == "scattering") return "unimodularity, phase shifts, pole blow-up";
    if (name == "resonances") return "Hankel zero table, counts and resonance atlas";
    return "brane quasimodes and dispersion residual";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral and scattering experiments for the volcano brane operator"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(vx::kVersion));

    std::string config_path, out_dir;
    int workers = -1;
    long long seed = -1;
    for (const std::string& name : vx::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, describe(name));
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--workers", workers, "worker threads, 0 = all cores (overrides the config)");
        sub->add_option("--seed", seed, "seed for randomized checks (overrides the config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(kBadConfig, "usage", e.what());
    }
    const std::string experiment = app.get_subcommands().front()->get_name();

    vx::ExperimentConfig cfg;
    try {
        cfg = vx::parse_config(load_config(config_path), experiment);
        if (!out_dir.empty()) cfg.output = out_dir;
        if (workers >= 0) cfg.workers = workers;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        vx::validate(cfg);
    } catch (const vx::ConfigError& e) {
        return report_error(kBadConfig, "config", e.what());
    } catch (const vx::json::exception& e) {
        return report_error(kBadConfig, "config", e.what());
    }

    vx::Outcome outcome;
    try {
        outcome = vx::run(cfg);
    } catch (const vx::ConfigError& e) {
        return report_error(kBadConfig, "config", e.what());
    } catch (const std::exception& e) {
        return report_error(kAborted, "runtime", e.what());
    }

    try {
        const fs::path dir(cfg.output);
        fs::create_directories(dir);
        for (const auto& a : outcome.artifacts) {
            std::ofstream f(dir / a.file, std::ios::binary);
            f << a.content;
            if (!f) throw std::runtime_error("cannot write " + (dir / a.file).string());
        }
        std::ofstream m(dir / "manifest.json", std::ios::binary);
        m << vx::manifest(cfg, outcome).dump(2) << '\n';
        if (!m) throw std::runtime_error("cannot write manifest.json");
    } catch (const std::exception& e) {
        return report_error(kAborted, "io", e.what());
    }

    if (!outcome.error.empty()) return report_error(kAborted, "runtime", outcome.error);
    for (const auto& c : outcome.checks)
        std::cout << (c.pass ? "  ok    " : "  FAIL  ") << c.name << " = " << c.value << '\n';
    std::cout << experiment << ": " << (outcome.pass() ? "PASS" : "FAIL") << " (" << outcome.seconds << " s) -> "
              << cfg.output << '\n';
    return outcome.pass() ? kPass : kFail;
}
