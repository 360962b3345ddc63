#pragma once

// Batch front-end: declarative run configs, analysis execution and report
// emission. Configs are JSON with comments allowed.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankone/constructions.hpp"
#include "rankone/criteria.hpp"

namespace rankone::cli {

using Json = nlohmann::json;

struct Limits {
    std::uint64_t size_limit = kDefaultSizeLimit;
    std::uint64_t word_limit = 100'000;
};

struct Analysis {
    std::string kind;
    Json params;  // canonical: defaults injected, rationals as "p/q"
};

struct RunConfig {
    Json spec;  // canonical spec source
    std::vector<Analysis> analyses;
    Limits limits;
    unsigned threads = 1;
    std::string out_dir;               // empty: no files
    std::vector<std::string> formats;  // subset of json, csv, text
};

/// Validates and canonicalizes. Throws Error(ConfigInvalid) naming the
/// offending field path, e.g. "analyses[2].eta".
RunConfig parse_config(const Json& doc);

/// Reads a config file; comments are accepted.
RunConfig load_config(const std::filesystem::path& path);

Json parse_json_text(const std::string& text, const std::string& origin);

/// Canonical form of `config`; parse_config(echo(c)) reproduces c.
Json echo(const RunConfig& config);

/// Replaces every depth in the analyses (schedule rows included).
void apply_depth_override(RunConfig& config, Stage depth);

/// Analysis kinds accepted in configs.
std::vector<std::string> analysis_kinds();

struct AnalysisRecord {
    std::size_t index = 0;
    std::string kind;
    Json params;
    Json result;                          // null when the analysis failed
    std::optional<std::string> error_kind;
    std::string error_message;
    std::vector<CyclicDiscrepancy> grid;  // discrepancy windows, for the tabular format
    std::vector<std::string> summary;     // human lines, may carry approximations
    double seconds = 0;
};

struct Report {
    Json config;
    std::string tool_version;
    std::vector<AnalysisRecord> analyses;
    double wall_seconds = 0;

    bool any_error() const;
};

/// The spec and its declared target, built from the canonical source.
Preset build_preset(const Json& spec_source);

/// Runs every analysis. Library errors are recorded per analysis and do
/// not stop siblings. Records are ordered by config position.
Report run(const RunConfig& config);

std::string tool_version();

/// Sorted keys, exact "p/q" rationals, no timing.
std::string emit_json(const Report& report);
/// Discrepancy windows of one analysis: k,m,n,best_j,delta_num,delta_den.
std::string emit_csv(const AnalysisRecord& record);
/// Every analysis with windows, each block introduced by a "# analysis" line.
std::string emit_csv(const Report& report);
/// Human summary with wall time; floats are marked approximate.
std::string emit_text(const Report& report);

/// Writes report.json, grid_<index>.csv per analysis with windows, and
/// report.txt into `dir`. Throws Error(IoError).
void write_outputs(const Report& report, const std::filesystem::path& dir, const std::vector<std::string>& formats);

}  // namespace rankone::cli
