#pragma once

#include "chns/diagnostics.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace chns {

/// One asserted (or recorded) quantity of an experiment.
struct Check {
    std::string name;
    /// Property being checked, in words.
    std::string property;
    double measured = 0.0;
    double threshold = 0.0;
    /// "<=", ">=", "<", ">" or "record" (reported, never fails).
    std::string relation;
    bool pass = true;
};

struct ExperimentReport {
    std::string name;
    std::vector<Check> checks;
    std::vector<std::string> notes;
    /// Worst ||div v||_inf over every step of every run in the experiment.
    double max_div = 0.0;
    /// Wall time in seconds (kept out of the written files).
    double seconds = 0.0;

    bool passed() const;
    const Check* find(const std::string& check_name) const;
};

struct ExperimentOptions {
    std::filesystem::path out_dir = "chns_output";
    std::uint64_t seed = 1;
    /// Progress lines; null silences them.
    std::ostream* log = nullptr;
};

using ExperimentFn = std::function<ExperimentReport(const ExperimentOptions&)>;

struct ExperimentEntry {
    std::string name;
    std::string summary;
    ExperimentFn fn;
};

const std::vector<ExperimentEntry>& experiment_registry();

/// Runs one registered experiment into out_dir/<name>/ and writes its report.
/// Throws std::invalid_argument for an unknown name.
ExperimentReport run_experiment(const std::string& name, const ExperimentOptions& opts);

/// Runs every registered experiment in registry order and writes out_dir/summary.csv.
std::vector<ExperimentReport> run_all_experiments(const ExperimentOptions& opts);

ExperimentReport exp_operators(const ExperimentOptions& opts);
ExperimentReport exp_mass_law(const ExperimentOptions& opts);
ExperimentReport exp_energy_dissipation(const ExperimentOptions& opts);
ExperimentReport exp_separation(const ExperimentOptions& opts);
ExperimentReport exp_continuous_dependence(const ExperimentOptions& opts);
ExperimentReport exp_decoupled_limits(const ExperimentOptions& opts);
ExperimentReport exp_manufactured_convergence(const ExperimentOptions& opts);
ExperimentReport exp_elliptic(const ExperimentOptions& opts);

/// report.csv (checks) and report.txt (human readable) in dir.
void write_report(const ExperimentReport& r, const std::filesystem::path& dir);

/// log2(coarse / fine): observed order from errors at h and h/2 (or dt and dt/2).
double observed_order(double coarse, double fine);

}  // namespace chns
