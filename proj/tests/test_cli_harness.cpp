#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "volcano/experiments.hpp"

namespace fs = std::filesystem;
namespace vx = volcano::experiments;
using vx::json;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("volcano_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Runs the CLI with `args`, capturing stderr into `err`; returns the exit status.
int run_cli(const std::string& args, const fs::path& dir, std::string* err = nullptr) {
    const fs::path err_file = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + VOLCANO_CLI + "\" " + args + " > \"" + (dir / "stdout.txt").string() +
                            "\" 2> \"" + err_file.string() + "\"";
    const int status = std::system(cmd.c_str());
    if (err) *err = slurp(err_file);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST(Config, DefaultsPerExperiment) {
    EXPECT_DOUBLE_EQ(vx::default_config("evolve").grid.dz, 0.005);
    EXPECT_DOUBLE_EQ(vx::default_config("evolve").data.center, 3.0);
    EXPECT_DOUBLE_EQ(vx::default_config("transform-check").grid.z_max, 20.0);
    EXPECT_EQ(vx::default_config("decay").extra.at("radial_profile"), "bump");
    for (const auto& name : vx::experiment_names()) EXPECT_NO_THROW(vx::validate(vx::default_config(name))) << name;
}

TEST(Config, OverridesAndOptions) {
    const json j = {{"grid", {{"dz", 0.02}, {"m_panels", 12}}},
                    {"data", {{"profile", "bump"}, {"parity", "odd"}, {"width", 0.5}}},
                    {"seed", 7},
                    {"workers", 2},
                    {"options", {{"pole_distance", 1e-4}}}};
    const vx::ExperimentConfig c = vx::parse_config(j, "scattering");
    EXPECT_DOUBLE_EQ(c.grid.dz, 0.02);
    EXPECT_EQ(c.grid.m_panels, 12);
    EXPECT_EQ(c.data.profile, vx::Profile::bump);
    EXPECT_EQ(c.data.parity, volcano::Parity::odd);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.workers, 2);
    EXPECT_DOUBLE_EQ(c.extra_number("pole_distance", 5e-4), 1e-4);
    EXPECT_DOUBLE_EQ(c.extra_number("missing", 3.0), 3.0);
    const vx::ExperimentConfig back = vx::parse_config(vx::to_json(c), "scattering");
    EXPECT_EQ(vx::to_json(back), vx::to_json(c));
}

TEST(Config, RejectsInvalidFields) {
    const json bad[] = {json::array(),
                        {{"grid", {{"dz", 0.1}}}},
                        {{"grid", {{"dz", -0.01}}}},
                        {{"grid", {{"z_max", "long"}}}},
                        {{"grid", 3}},
                        {{"data", {{"profile", "square"}}}},
                        {{"data", {{"parity", "both"}}}},
                        {{"data", {{"width", 0.0}}}},
                        {{"workers", -1}},
                        {{"experiment", "decay"}},
                        {{"options", 1}}};
    for (const json& j : bad) EXPECT_THROW(vx::parse_config(j, "modes"), vx::ConfigError) << j.dump();
    vx::ExperimentConfig c = vx::default_config("modes");
    c.experiment = "nonsense";
    EXPECT_THROW(vx::validate(c), vx::ConfigError);
}

TEST(Config, CriterionMapping) {
    EXPECT_EQ(vx::experiment_for_criterion(1), "resonances");
    EXPECT_EQ(vx::experiment_for_criterion(5), "evolve");
    EXPECT_EQ(vx::experiment_for_criterion(9), "quasimode");
    EXPECT_THROW(vx::experiment_for_criterion(0), volcano::InvalidArgument);
    EXPECT_THROW(vx::experiment_for_criterion(10), volcano::InvalidArgument);
}

TEST(Binary, OversizedStepExitsWithTwoAndJson) {
    const fs::path d = scratch_dir("dz");
    write_file(d / "cfg.json", R"({"grid": {"dz": 0.1}})");
    std::string err;
    EXPECT_EQ(run_cli("modes --config \"" + (d / "cfg.json").string() + "\" --out \"" + (d / "out").string() + "\"", d,
                      &err),
              2);
    const json j = json::parse(err);
    EXPECT_EQ(j.at("error").at("exit_code"), 2);
    EXPECT_EQ(j.at("error").at("type"), "config");
    EXPECT_NE(j.at("error").at("message").get<std::string>().find("dz"), std::string::npos);
    EXPECT_FALSE(fs::exists(d / "out"));
}

TEST(Binary, MalformedJsonAndMissingFile) {
    const fs::path d = scratch_dir("malformed");
    write_file(d / "cfg.json", "{\"grid\": ");
    std::string err;
    EXPECT_EQ(run_cli("scattering --config \"" + (d / "cfg.json").string() + "\"", d, &err), 2);
    EXPECT_TRUE(json::parse(err).contains("error"));
    EXPECT_EQ(run_cli("scattering --config \"" + (d / "absent.json").string() + "\"", d, &err), 2);
    EXPECT_TRUE(json::parse(err).contains("error"));
}

TEST(Binary, UsageErrors) {
    const fs::path d = scratch_dir("usage");
    std::string err;
    EXPECT_EQ(run_cli("no-such-experiment", d, &err), 2);
    EXPECT_EQ(json::parse(err).at("error").at("type"), "usage");
    EXPECT_EQ(run_cli("modes --workers many", d, &err), 2);
    EXPECT_EQ(run_cli("", d, &err), 2);
}

TEST(Binary, ScatteringRunIsDeterministic) {
    const fs::path d = scratch_dir("determinism");
    const fs::path a = d / "a", b = d / "b";
    EXPECT_EQ(run_cli("scattering --out \"" + a.string() + "\" --workers 1", d), 0);
    EXPECT_EQ(run_cli("scattering --out \"" + b.string() + "\" --workers 3", d), 0);
    for (const char* f : {"phase_shifts.csv", "amplitude.csv"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_FALSE(slurp(a / f).empty());
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    const json m = json::parse(slurp(a / "manifest.json"));
    EXPECT_EQ(m.at("config").at("experiment"), "scattering");
    EXPECT_EQ(m.at("config").at("workers"), 1);
    EXPECT_TRUE(m.at("pass").get<bool>());
    bool listed = false;
    for (const auto& f : m.at("files")) listed = listed || f == "phase_shifts.csv";
    EXPECT_TRUE(listed);
}
