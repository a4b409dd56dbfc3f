#pragma once
/**
 * @file experiment_config.hpp
 * @brief Experiment configuration, validation, graded checks and the small
 *        CSV writer shared by the recipes and the command-line tool.
 *
 * Precedence: built-in defaults per experiment, then the JSON config file,
 * then command-line flags.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "volcano/errors.hpp"
#include "volcano/distorted_transform.hpp"

namespace volcano::experiments {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

/// Rejected configuration; the command-line tool maps it to exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"special-functions", "modes",     "transform-check",
                                                   "evolve",            "decay",     "resolvent-check",
                                                   "scattering",        "resonances", "quasimode"};
    return names;
}

struct GridSpec {
    double z_max = 60.0;
    double dz = 0.01;
    double m_max = 20.0;
    int m_panels = 8;
    double t_max = 10.0;
    double dt_report = 1.0;
};

enum class Profile { gaussian, bump };

struct DataSpec {
    Profile profile = Profile::gaussian;
    double center = 0.0;
    double width = 1.0;
    Parity parity = Parity::even;
    bool zero_mode_free = true;
};

struct ExperimentConfig {
    std::string experiment;
    GridSpec grid;
    DataSpec data;
    std::uint64_t seed = 20240601;
    int workers = 0;  ///< 0: all available cores
    std::string output = "out";
    json extra = json::object();  ///< experiment-specific knobs, echoed as given

    double extra_number(const std::string& key, double fallback) const {
        return extra.contains(key) ? extra.at(key).get<double>() : fallback;
    }
};

/// Defaults reproduce the acceptance settings of each experiment.
inline ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    GridSpec& g = c.grid;
    DataSpec& d = c.data;
    if (experiment == "modes") {
        g = {60.0, 0.01, 20.0, 8, 1.0, 1.0};
    } else if (experiment == "transform-check") {
        g = {20.0, 0.05, 20.0, 8, 1.0, 1.0};
    } else if (experiment == "evolve") {
        g = {25.0, 0.005, 20.0, 16, 50.0, 5.0};
        d = {Profile::gaussian, 3.0, 1.0, Parity::even, false};
    } else if (experiment == "decay") {
        g = {12.0, 0.01, 20.0, 400, 200.0, 1.0};
        c.extra = {{"radial_profile", "bump"}, {"radial_support", 3.0}, {"t_min", 20.0}, {"samples", 16}};
    } else if (experiment == "resolvent-check") {
        g = {6.0, 0.005, 20.0, 8, 1.0, 1.0};
        d = {Profile::bump, 3.0, 1.5, Parity::even, false};
    } else if (experiment == "quasimode") {
        g = {10.0, 0.001, 20.0, 8, 1.0, 1.0};
    }
    return c;
}

namespace detail {

inline Profile parse_profile(const std::string& s) {
    if (s == "gaussian") return Profile::gaussian;
    if (s == "bump") return Profile::bump;
    throw ConfigError("data.profile must be \"gaussian\" or \"bump\", got \"" + s + "\"");
}

inline Parity parse_parity(const std::string& s) {
    if (s == "even") return Parity::even;
    if (s == "odd") return Parity::odd;
    throw ConfigError("data.parity must be \"even\" or \"odd\", got \"" + s + "\"");
}

template <class T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

}  // namespace detail

inline const char* profile_name(Profile p) { return p == Profile::gaussian ? "gaussian" : "bump"; }

/// Checks the invariants: every grid quantity positive, dz <= 0.05 (the
/// operator stencils need it), a usable data width.
inline void validate(const ExperimentConfig& c) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end())
        throw ConfigError("unknown experiment \"" + c.experiment + "\"");
    const GridSpec& g = c.grid;
    const std::pair<const char*, double> positive[] = {{"z_max", g.z_max},         {"dz", g.dz},
                                                       {"m_max", g.m_max},         {"t_max", g.t_max},
                                                       {"dt_report", g.dt_report}, {"m_panels", double(g.m_panels)}};
    for (const auto& [name, v] : positive)
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("grid.") + name + " must be positive");
    if (g.dz > kMaxOperatorStep)
        throw ConfigError("grid.dz = " + std::to_string(g.dz) + " exceeds 0.05, the largest step the operator stencils accept");
    if (g.dz >= g.z_max) throw ConfigError("grid.dz must be smaller than grid.z_max");
    if (!(c.data.width > 0.0) || !std::isfinite(c.data.width)) throw ConfigError("data.width must be positive");
    if (!std::isfinite(c.data.center) || c.data.center < 0.0) throw ConfigError("data.center must be non-negative");
    if (c.workers < 0) throw ConfigError("workers must be non-negative");
}

/// Applies the fields present in `j` on top of the defaults for `experiment`.
inline ExperimentConfig parse_config(const json& j, const std::string& experiment) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("experiment") && j.at("experiment") != experiment)
        throw ConfigError("config names experiment " + j.at("experiment").dump() + " but \"" + experiment +
                          "\" was requested");
    ExperimentConfig c = default_config(experiment);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (!g.is_object()) throw ConfigError("grid must be an object");
        detail::read_field(g, "z_max", c.grid.z_max, "grid");
        detail::read_field(g, "dz", c.grid.dz, "grid");
        detail::read_field(g, "m_max", c.grid.m_max, "grid");
        detail::read_field(g, "m_panels", c.grid.m_panels, "grid");
        detail::read_field(g, "t_max", c.grid.t_max, "grid");
        detail::read_field(g, "dt_report", c.grid.dt_report, "grid");
    }
    if (j.contains("data")) {
        const json& d = j.at("data");
        if (!d.is_object()) throw ConfigError("data must be an object");
        std::string s;
        if (d.contains("profile")) {
            detail::read_field(d, "profile", s, "data");
            c.data.profile = detail::parse_profile(s);
        }
        if (d.contains("parity")) {
            detail::read_field(d, "parity", s, "data");
            c.data.parity = detail::parse_parity(s);
        }
        detail::read_field(d, "center", c.data.center, "data");
        detail::read_field(d, "width", c.data.width, "data");
        detail::read_field(d, "zero_mode_free", c.data.zero_mode_free, "data");
    }
    detail::read_field(j, "seed", c.seed, "config");
    detail::read_field(j, "workers", c.workers, "config");
    detail::read_field(j, "output", c.output, "config");
    if (j.contains("options")) {
        if (!j.at("options").is_object()) throw ConfigError("options must be an object");
        for (const auto& [k, v] : j.at("options").items()) c.extra[k] = v;
    }
    validate(c);
    return c;
}

inline json to_json(const ExperimentConfig& c) {
    return {{"experiment", c.experiment},
            {"grid",
             {{"z_max", c.grid.z_max},
              {"dz", c.grid.dz},
              {"m_max", c.grid.m_max},
              {"m_panels", c.grid.m_panels},
              {"t_max", c.grid.t_max},
              {"dt_report", c.grid.dt_report}}},
            {"data",
             {{"profile", profile_name(c.data.profile)},
              {"center", c.data.center},
              {"width", c.data.width},
              {"parity", parity_name(c.data.parity)},
              {"zero_mode_free", c.data.zero_mode_free}}},
            {"seed", c.seed},
            {"workers", c.workers},
            {"output", c.output},
            {"options", c.extra}};
}

// ---------------------------------------------------------------------------
// Graded outcome

struct Check {
    std::string name;
    double value = 0.0;
    std::string relation;  ///< "<", ">" or "in"
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
};

struct Artifact {
    std::string file;
    std::string content;
};

struct Outcome {
    json metrics = json::object();
    std::vector<Check> checks;
    std::vector<Artifact> artifacts;
    double seconds = 0.0;
    std::string error;  ///< set when the recipe aborted

    bool pass() const {
        if (!error.empty() || checks.empty()) return false;
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }

    void below(const std::string& name, double v, double limit) { checks.push_back({name, v, "<", 0.0, limit, v < limit}); }
    void above(const std::string& name, double v, double limit) { checks.push_back({name, v, ">", limit, 0.0, v > limit}); }
    void inside(const std::string& name, double v, double lo, double hi) {
        checks.push_back({name, v, "in", lo, hi, v >= lo && v <= hi});
    }
};

inline json to_json(const Check& c) {
    json j = {{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"pass", c.pass}};
    if (c.relation == "<") j["threshold"] = c.hi;
    else if (c.relation == ">") j["threshold"] = c.lo;
    else j["band"] = {c.lo, c.hi};
    return j;
}

inline json manifest(const ExperimentConfig& c, const Outcome& o) {
    json checks = json::array();
    for (const auto& k : o.checks) checks.push_back(to_json(k));
    json files = json::array();
    for (const auto& a : o.artifacts) files.push_back(a.file);
    json m = {{"experiment", c.experiment}, {"version", kVersion}, {"config", to_json(c)},
              {"metrics", o.metrics},       {"checks", checks},     {"pass", o.pass()},
              {"files", files},             {"runtime_s", o.seconds}};
    if (!o.error.empty()) m["error"] = o.error;
    return m;
}

/// Comma-separated table with a header row, point decimals, UNIX newlines.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
        text_ += '\n';
    }

    CsvTable& cell(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return put(buf);
    }
    CsvTable& cell(long long v) { return put(std::to_string(v)); }
    CsvTable& cell(int v) { return put(std::to_string(v)); }
    CsvTable& cell(const std::string& s) { return put(s); }
    CsvTable& cell(const char* s) { return put(s); }

    const std::string& text() const { return text_; }

private:
    CsvTable& put(const std::string& s) {
        text_ += (filled_ ? "," : "") + s;
        if (++filled_ == columns_) {
            text_ += '\n';
            filled_ = 0;
        }
        return *this;
    }

    std::size_t columns_;
    std::size_t filled_ = 0;
    std::string text_;
};

}  // namespace volcano::experiments
