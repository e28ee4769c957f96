#include "opa/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <vector>

namespace opa {

namespace {

constexpr std::array<std::string_view, 27> kKnownKeys = {
    "scenario",   "omega0",      "omega1",      "omega2",      "kappa",     "phi",       "alpha0_re",
    "alpha0_im",  "alpha1_re",   "alpha1_im",   "alpha2_re",   "alpha2_im", "d0",        "d1",
    "d2",         "t_final",     "dt",          "n_slices",    "n_samples", "temperature", "seed",
    "include_zero_point", "sweep_key", "sweep_start", "sweep_stop", "sweep_count", "output",
};

constexpr std::array<std::string_view, 9> kSweepableKeys = {
    "kappa", "phi", "alpha0_re", "alpha0_im", "alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im", "t_final",
};

struct Entry {
    std::string value;
    int line;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<Scenario> scenario_from(std::string_view name) {
    static const std::map<std::string_view, Scenario> names = {
        {"meanfield", Scenario::meanfield},
        {"quantum", Scenario::quantum},
        {"fluorescence", Scenario::fluorescence},
        {"propagator-convergence", Scenario::propagator_convergence},
        {"action-check", Scenario::action_check},
        {"thermal-ensemble", Scenario::thermal_ensemble},
        {"sweep", Scenario::sweep},
    };
    const auto it = names.find(name);
    if (it == names.end()) return std::nullopt;
    return it->second;
}

class Entries {
public:
    explicit Entries(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

    void require(const std::string& key, std::string_view scenario) const {
        if (!has(key)) {
            throw ConfigError("missing required key '" + key + "' for scenario " + std::string(scenario), 0);
        }
    }

    double real(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const auto& e = entries_.at(key);
        double v = 0.0;
        const char* end = e.value.data() + e.value.size();
        const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
        if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
            throw ConfigError("cannot parse '" + e.value + "' as a finite number for key '" + key + "'", e.line);
        }
        return v;
    }

    template <typename Int>
    Int integer(const std::string& key, Int fallback) const {
        if (!has(key)) return fallback;
        const auto& e = entries_.at(key);
        Int v{};
        const char* end = e.value.data() + e.value.size();
        const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
        if (ec != std::errc() || ptr != end) {
            throw ConfigError("cannot parse '" + e.value + "' as an integer for key '" + key + "'", e.line);
        }
        return v;
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& e = entries_.at(key);
        if (e.value == "true" || e.value == "1") return true;
        if (e.value == "false" || e.value == "0") return false;
        throw ConfigError("cannot parse '" + e.value + "' as a boolean for key '" + key + "'", e.line);
    }

    const std::string& text(const std::string& key) const { return entries_.at(key).value; }

private:
    std::map<std::string, Entry> entries_;
};

std::map<std::string, Entry> tokenize(std::string_view text) {
    std::map<std::string, Entry> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
            throw ConfigError("unknown key '" + key + "'", line_no);
        }
        if (value.empty()) throw ConfigError("empty value for key '" + key + "'", line_no);
        if (const auto it = entries.find(key); it != entries.end()) {
            throw ConfigError("duplicate key '" + key + "' (first defined on line " +
                                  std::to_string(it->second.line) + ", again on line " + std::to_string(line_no) + ")",
                              line_no);
        }
        entries.emplace(key, Entry{value, line_no});
    }
    return entries;
}

std::vector<std::string> required_keys(Scenario s) {
    std::vector<std::string> keys = {"scenario", "omega0", "omega1", "omega2", "kappa", "t_final"};
    const auto add = [&](std::initializer_list<const char*> more) { keys.insert(keys.end(), more.begin(), more.end()); };
    switch (s) {
    case Scenario::meanfield: add({"dt"}); break;
    case Scenario::quantum:
    case Scenario::fluorescence: add({"dt", "d0", "d1", "d2"}); break;
    case Scenario::propagator_convergence: add({"d0", "d1", "d2", "n_slices"}); break;
    case Scenario::action_check: add({"dt"}); break;
    case Scenario::thermal_ensemble: add({"dt", "temperature", "n_samples"}); break;
    case Scenario::sweep: add({"dt", "sweep_key", "sweep_start", "sweep_stop", "sweep_count"}); break;
    }
    return keys;
}

bool is_time_series(Scenario s) {
    return s != Scenario::propagator_convergence;
}

} // namespace

std::string_view scenario_name(Scenario s) {
    switch (s) {
    case Scenario::meanfield: return "meanfield";
    case Scenario::quantum: return "quantum";
    case Scenario::fluorescence: return "fluorescence";
    case Scenario::propagator_convergence: return "propagator-convergence";
    case Scenario::action_check: return "action-check";
    case Scenario::thermal_ensemble: return "thermal-ensemble";
    case Scenario::sweep: return "sweep";
    }
    return "unknown";
}

bool is_sweepable_key(std::string_view key) {
    return std::find(kSweepableKeys.begin(), kSweepableKeys.end(), key) != kSweepableKeys.end();
}

RunConfig with_value(const RunConfig& config, std::string_view key, double value) {
    RunConfig c = config;
    if (key == "kappa") {
        c.params.kappa = value;
    } else if (key == "phi") {
        c.params.phi = value;
    } else if (key == "t_final") {
        c.t_final = value;
    } else if (key.starts_with("alpha") && key.size() == 9) {
        const auto mode = static_cast<std::size_t>(key[5] - '0');
        Complex& z = c.initial.at(mode);
        z = key.ends_with("_re") ? Complex{value, z.imag()} : Complex{z.real(), value};
        c.params.pump_alpha0 = c.initial[0];
    } else {
        throw InvalidArgument("key '" + std::string(key) + "' cannot be swept");
    }
    return c;
}

RunConfig parse_config(std::string_view text) {
    const Entries e(tokenize(text));
    if (!e.has("scenario")) throw ConfigError("missing required key 'scenario'", 0);
    const auto scenario = scenario_from(e.text("scenario"));
    if (!scenario) throw ConfigError("unknown scenario '" + e.text("scenario") + "'", e.line("scenario"));

    RunConfig c;
    c.scenario = *scenario;
    const auto name = scenario_name(c.scenario);
    for (const auto& key : required_keys(c.scenario)) e.require(key, name);

    c.params.omega = {e.real("omega0", 0.0), e.real("omega1", 0.0), e.real("omega2", 0.0)};
    c.params.kappa = e.real("kappa", 0.0);
    c.params.phi = e.real("phi", 0.0);
    c.params.include_zero_point = e.boolean("include_zero_point", false);
    c.initial = {Complex{e.real("alpha0_re", 0.0), e.real("alpha0_im", 0.0)},
                 Complex{e.real("alpha1_re", 0.0), e.real("alpha1_im", 0.0)},
                 Complex{e.real("alpha2_re", 0.0), e.real("alpha2_im", 0.0)}};
    c.params.pump_alpha0 = c.initial[0];

    if (c.params.kappa < 0.0) throw ConfigError("kappa must be >= 0", e.line("kappa"));
    try {
        c.params.validate();
    } catch (const InvalidArgument& err) {
        throw ConfigError(err.what(), e.line("omega0"));
    }

    c.t_final = e.real("t_final", 0.0);
    if (c.t_final < 0.0) throw ConfigError("t_final must be >= 0", e.line("t_final"));
    c.dt = e.real("dt", 0.0);
    if (e.has("dt") && !(c.dt > 0.0)) throw ConfigError("dt must be > 0", e.line("dt"));
    if (is_time_series(c.scenario) && c.t_final < c.dt) {
        throw ConfigError("t_final must be >= dt", e.line("t_final"));
    }

    c.n_slices = e.integer<int>("n_slices", c.n_slices);
    if (c.n_slices < 1) throw ConfigError("n_slices must be >= 1", e.line("n_slices"));
    if (c.scenario == Scenario::propagator_convergence && c.t_final <= 0.0) {
        throw ConfigError("propagator-convergence needs t_final > 0", e.line("t_final"));
    }
    c.n_samples = e.integer<int>("n_samples", c.n_samples);
    if (c.n_samples < 1) throw ConfigError("n_samples must be >= 1", e.line("n_samples"));

    c.thermal.temperature = e.real("temperature", 0.0);
    if (c.thermal.temperature < 0.0) throw ConfigError("temperature must be >= 0", e.line("temperature"));
    c.thermal.seed = e.integer<std::uint64_t>("seed", 0);
    if (c.scenario == Scenario::thermal_ensemble && !(c.params.omega[1] > 0.0 && c.params.omega[2] > 0.0)) {
        throw ConfigError("thermal seeding needs omega1 > 0 and omega2 > 0", e.line("omega1"));
    }

    if (e.has("d0") || e.has("d1") || e.has("d2")) {
        for (const char* key : {"d0", "d1", "d2"}) e.require(key, name);
        const int d0 = e.integer<int>("d0", 0);
        const int d1 = e.integer<int>("d1", 0);
        const int d2 = e.integer<int>("d2", 0);
        try {
            c.dims.emplace(d0, d1, d2);
        } catch (const ResourceError& err) {
            throw ResourceError("line " + std::to_string(e.line("d0")) + ": " + err.what());
        } catch (const InvalidArgument& err) {
            throw ConfigError(err.what(), e.line("d0"));
        }
    }

    if (c.scenario == Scenario::sweep) {
        SweepAxis axis;
        axis.key = e.text("sweep_key");
        if (!is_sweepable_key(axis.key)) {
            throw ConfigError("sweep_key '" + axis.key + "' is not a sweepable parameter", e.line("sweep_key"));
        }
        axis.start = e.real("sweep_start", 0.0);
        axis.stop = e.real("sweep_stop", 0.0);
        axis.count = e.integer<int>("sweep_count", 1);
        if (axis.count < 1) throw ConfigError("sweep_count must be >= 1", e.line("sweep_count"));
        for (int i = 0; i < axis.count; ++i) {
            const double v = axis.value(i);
            if (axis.key == "kappa" && v < 0.0) throw ConfigError("swept kappa must stay >= 0", e.line("sweep_start"));
            if (axis.key == "t_final" && v < c.dt) {
                throw ConfigError("swept t_final must stay >= dt", e.line("sweep_start"));
            }
        }
        c.sweep = axis;
    }

    c.output_path = e.has("output") ? e.text("output") : std::string(name) + ".csv";
    return c;
}

} // namespace opa
