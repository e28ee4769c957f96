#ifndef OPA_CONFIG_HPP
#define OPA_CONFIG_HPP

#include <optional>
#include <string>
#include <string_view>

#include "opa/errors.hpp"
#include "opa/fockspace.hpp"
#include "opa/thermal_noise.hpp"

namespace opa {

enum class Scenario {
    meanfield,
    quantum,
    fluorescence,
    propagator_convergence,
    action_check,
    thermal_ensemble,
    sweep,
};

std::string_view scenario_name(Scenario s);

struct SweepAxis {
    std::string key;
    double start = 0.0;
    double stop = 0.0;
    int count = 1;

    double value(int i) const {
        return count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1);
    }
};

struct RunConfig {
    Scenario scenario = Scenario::meanfield;
    ModeParams params;
    /// Initial amplitudes (alpha0, alpha1, alpha2); alpha0 doubles as the pump.
    ModeTriple initial{};
    std::optional<TruncationDims> dims;
    double t_final = 0.0;
    double dt = 0.0;
    int n_slices = 1024;
    int n_samples = 1000;
    ThermalParams thermal;
    std::string output_path;
    std::optional<SweepAxis> sweep;
};

/// A configuration problem, located at a 1-based line (0 when the problem is
/// a missing key).
class ConfigError : public InvalidArgument {
public:
    ConfigError(const std::string& what, int line)
        : InvalidArgument(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Parses line-oriented `key = value` text with `#` comments. Keys are
/// case-sensitive; unknown or duplicate keys, unparsable values, missing
/// required keys and violated invariants are reported as ConfigError.
/// A truncation above the dimension cap raises ResourceError.
RunConfig parse_config(std::string_view text);

/// Keys a sweep may vary.
bool is_sweepable_key(std::string_view key);

/// Returns a copy of @p config with @p key set to @p value.
RunConfig with_value(const RunConfig& config, std::string_view key, double value);

} // namespace opa

#endif // OPA_CONFIG_HPP
