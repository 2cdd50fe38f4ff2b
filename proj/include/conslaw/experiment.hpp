#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conslaw/flux_analysis.hpp"

namespace conslaw {

inline constexpr const char kToolVersion[] = "conslaw 0.1.0";

enum class ExperimentKind { Degeneracy, Variation, Cheng, Wkb, Sweep, OracleCheck };

// CLI subcommand names: degeneracy, variation, cheng, wkb, sweep, oracle-check.
ExperimentKind kind_from_name(const std::string& name);
std::string kind_name(ExperimentKind kind);

// Flat `key = value` config with `[section]` headers, fully validated: the
// flux is constructed, every kind parameter is checked, and the estimated
// cell-update cost is compared against the ceiling before any computation.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Degeneracy;
    std::optional<Flux> flux;
    // every parsed `section.key` -> raw value (validated keys only)
    std::map<std::string, std::string> values;
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 20260822;       // randomized-grid experiments only
    double cost_ceiling = 1e9;           // max estimated cell updates
    double cost_estimate = 0.0;
    std::string config_hash;             // FNV-1a over the raw file bytes
    std::string raw_text;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunManifest {
    ExperimentKind kind = ExperimentKind::Degeneracy;
    std::string config_hash;
    std::string version;
    double wall_ms = 0.0;
    // "completed", or the stage that was running when an error was recorded
    std::string stage;
    std::vector<CheckResult> checks;
    std::vector<std::string> errors;
    bool ok = false;  // no errors and every check passed
};

// Parses and validates. `cli_kind` is the subcommand; a [run] kind entry is
// optional but must agree with it. With no subcommand the [run] kind entry
// is required. Throws ParseError (malformed line) or ValidationError
// (every invalid field listed, not just the first).
ExperimentConfig parse_config(const std::filesystem::path& path,
                              std::optional<ExperimentKind> cli_kind = std::nullopt);

// Runs the configured experiment, writing CSV artifacts and manifest.txt
// into out_dir. The manifest is written even when a stage fails; module
// errors are recorded rather than propagated.
RunManifest run_experiment(const ExperimentConfig& config);

// The exact text written to manifest.txt.
std::string manifest_text(const RunManifest& manifest, const ExperimentConfig& config);

// 16-hex-digit FNV-1a of a byte string (the config hash echoed in CSVs).
std::string fnv1a_hex(const std::string& bytes);

}  // namespace conslaw
