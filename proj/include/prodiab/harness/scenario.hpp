#pragma once

#include <string>
#include <vector>

#include "prodiab/elimination.hpp"
#include "prodiab/harness/compare.hpp"
#include "prodiab/harness/config.hpp"
#include "prodiab/ode.hpp"
#include "prodiab/stirap.hpp"

namespace prodiab::harness {

enum class ScenarioKind { jc_sigmaz, jc_g2, stirap };

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::jc_sigmaz;
    std::string name;  // scenario string as written
    std::vector<std::string> representations;
    double grid_start = 0.0;
    double grid_end = 0.0;
    int grid_points = 0;

    JCParams jc;                 // kappa = 1
    std::vector<double> drives;  // jc-sigmaz sweep, f/kappa
    LambdaParams lambda;
    int initial_level = 1;

    IntegratorConfig integrator;
    int exact_n_max = 0;  // 0: scenario default with one automatic escalation
    std::string output_dir;

    // every key with its resolved value, sorted
    std::vector<std::pair<std::string, std::string>> resolved;

    static ScenarioConfig from_config(const Config& c);
    std::vector<double> grid() const;
};

// Families: one output file each.
struct ScenarioResult {
    std::vector<std::pair<std::string, CurveSet>> families;
    std::vector<ComparisonReport> reports;
    std::vector<std::string> files;
    int exit_code = 0;  // 4 when a leak survives the retry

    const CurveSet& family(const std::string& name) const;
    const ComparisonReport& report(const std::string& name) const;
};

// Runs the scenario. Files are written only when write_files is set.
ScenarioResult run_scenario(const ScenarioConfig& cfg, bool write_files = true);

// Upper bound on concurrent runs: PRODIAB_THREADS if set, else hardware threads.
unsigned worker_threads();

std::string format_number(double v);

}  // namespace prodiab::harness
