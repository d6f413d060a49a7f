#pragma once

#include "ulpm/dynamics.hpp"
#include "ulpm/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace ulpm::experiment {

enum class Kind { flow, example31, nc_verify, sphere_compare, certify_sweep };

Kind kind_from_string(const std::string& name);  // throws invalid_argument
std::string to_string(Kind kind);

/// Fully resolved run description. String keys accepted by set() mirror
/// the CLI flags and the `key = value` config-file lines; hyphen and
/// underscore spellings are interchangeable.
struct ExperimentConfig {
    Kind kind = Kind::flow;
    int classes = 0;  // required, >= 2
    int per_class = 1;
    int dim = 2;
    dynamics::FlowConfig flow;
    double radius = 4.0;     // nc-verify / sphere-compare
    long samples = 10000;    // sphere-compare random draws
    std::string out_dir = ".";
    bool emit_csv = true;
    bool emit_json = true;

    ProblemShape shape() const { return {classes, per_class, dim}; }

    // Assign one key. Unknown keys and unparsable values throw
    // std::invalid_argument naming the offender.
    void set(const std::string& key, const std::string& value);

    // Line-oriented `key = value` text, '#' starts a comment. Values set
    // here are overridden by later set() calls (flag precedence).
    void load_file(const std::filesystem::path& path);

    void validate() const;  // throws invalid_argument with the constraint named

    std::map<std::string, std::string> resolved() const;  // for JSON summaries
};

enum class RunStatus { ok = 0, usage_error = 1, diverged = 2, internal_error = 3 };

/// Executes the configured experiment and writes its artifacts under
/// out_dir (created if missing). A diverged flow still writes the partial
/// CSV and returns RunStatus::diverged. Diagnostics go to `diag`.
RunStatus run(const ExperimentConfig& cfg, std::ostream& diag);

/// Trajectory CSV, schema v1: one comment line, the fixed header, one row
/// per checkpoint, 17 significant digits, saturated values as `nan`.
void write_trajectory_csv(const dynamics::TrajectoryRecord& rec,
                          std::ostream& out);

extern const char* const kTrajectoryCsvHeader;

/// 17-significant-digit formatting used by every CSV writer; non-finite
/// values become the literal token `nan`.
std::string format_value(double v);

}  // namespace ulpm::experiment
