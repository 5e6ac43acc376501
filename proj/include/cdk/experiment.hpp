#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cdk/mat2.hpp"

namespace cdk {

/// Schema violations: unknown keys, missing fields, bad values. Reported as
/// exit code 2 by the CLI.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed experiment description (JSON, "schema": 1). Everything that
/// influences the numbers lives here; the CLI only adds output location and
/// worker count.
struct ExperimentConfig {
    std::string kind;    // kernel | universality-scalar | universality-matrix |
                         // equivalence | clock | subordinacy | opuc |
                         // cansys-check | mfun
    std::string model;   // model id, resolved per kind
    std::string prefix = "experiment";  // output file stem
    std::string eta;     // "" = derive from boundary data; "inf" | "re[,im]"
    std::vector<double> xis;
    std::vector<double> indices;      // n or L values
    std::vector<Complex> grid;        // empty = default grid
    double f = 0.0;                   // scaling density; 0 = derive
    double g = 1.0;                   // circle-case scaling
    long j_range = 5;
    double threshold = -1.0;          // asserted sup bound; < 0 = report only
    bool assert_decay = false;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
};

/// Runs the experiment, writing <prefix>_report.json, per-index CSV tables
/// and <prefix>_meta.txt (timestamps only) into out_dir. Returns 0 when all
/// asserted thresholds pass, 1 otherwise. Throws ConfigError for semantic
/// configuration problems discovered at run time.
int run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                   int jobs = 1);

/// Model ids the runner recognizes, for --list-models.
std::vector<std::string> list_models();

}  // namespace cdk
