#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "mvstab/model.hpp"
#include "mvstab/sim.hpp"
#include "mvstab/stability.hpp"

namespace mvstab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputConfig {
    std::string directory = ".";
    std::string prefix = "run";
};

/// Parsed run configuration. The file is strict JSON: unknown keys are
/// rejected with the offending key named, and every invariant violation
/// names the key it concerns.
struct RunConfig {
    LinearMeanFieldParams model;
    SimConfig sim;
    std::optional<ConditionConstants> constants;
    OutputConfig output;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text);

/// Resolved config back as canonical JSON (for run manifests).
std::string run_config_to_json(const RunConfig& cfg);

}  // namespace mvstab
