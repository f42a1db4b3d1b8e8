#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace skdv {

// Invalid configuration; path() names the offending field, e.g. "experiments[2].n_max".
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string path, const std::string& message);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

enum class ExperimentKind { Simulate, SampleNoise, StochasticConvolution, Norm, VerifyEstimates, ConvergenceStudy };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);
const std::vector<ExperimentKind>& all_experiment_kinds();

// One experiment cell; params holds every key of the kind's schema with defaults filled in.
struct ExperimentCell {
    ExperimentKind kind = ExperimentKind::Simulate;
    nlohmann::json params;
};

// Top level of the config file:
//   {"name": str, "seed": int, "output_root": str, "regime_check": bool,
//    "experiments": [{"kind": str, ...params}]}
// Unknown keys anywhere are rejected.
struct ExperimentConfig {
    std::string name = "experiment";
    std::uint64_t seed = 1;
    std::string output_root = "runs";
    bool regime_check = true;
    std::vector<ExperimentCell> experiments;
};

// Default parameter block for a kind; kinds with variants take the variant name
// ("scenario" for simulate, "study" for the others that have one).
nlohmann::json default_params(ExperimentKind kind, const std::string& variant = "");
// Variant names accepted by a kind, first is the default; empty when the kind has none.
std::vector<std::string> variants(ExperimentKind kind);

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& file);

// Resolved config with the pinned conventions (cutoff, dyadic partition, rng).
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json conventions_json();

// 64-bit FNV-1a of the resolved config without output_root, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct RunResult {
    std::filesystem::path directory;  // output_root / hash
    int exit_code = 0;                // 0 when every cell succeeded, 1 otherwise
    nlohmann::json summary;
    nlohmann::json manifest;
};

// Runs every cell (cell i draws from derive_seed(seed, i)) and writes into the directory:
//   config.json    resolved config echo
//   summary.json   config echo and per-cell scalars, status and file lists
//   cell-<i>-<kind>/<table>.csv and <plot>.plot.csv
//   manifest.json  files, plot axes, cell timings and timestamps
// Everything except the manifest is a function of the config and the build.
RunResult run(const ExperimentConfig& config);

struct ScalarDiff {
    std::string path;
    double a = 0;
    double b = 0;
    double relative = 0;  // |b - a| / |a|; 0 when both vanish, infinite when only a does
    bool flagged = false;
};

struct Comparison {
    std::vector<ScalarDiff> scalars;
    std::vector<std::string> config_differences;  // leaf paths whose values differ
    int flagged = 0;
    double tolerance = 0;
};

// Compares two summaries cell by cell; throws std::invalid_argument when the cell kinds differ.
Comparison compare_reports(const nlohmann::json& a, const nlohmann::json& b, double tolerance = 0.05);
nlohmann::json to_json(const Comparison& comparison);

}  // namespace skdv
