#pragma once

#include <filesystem>

#include "fluxladder/config.hpp"

namespace fluxladder {

// Observables and artifacts for one sweep point (one leg ratio).
struct SweepPointResult {
    double ratio = 0.0;
    LatticeSpec spec;
    double energy = 0.0;
    bool degenerate = false;
    std::optional<double> ramp_fidelity;
    std::optional<double> ramp_fidelity_noisy;
    ObservableReport exact;
    std::optional<ObservableReport> estimated;  // shot-based, when plans ran
    std::vector<ShotTable> tables;
};

struct SweepResult {
    std::vector<SweepPointResult> points;
    std::vector<std::filesystem::path> artifacts;
};

// Orchestration entry points backing the CLI subcommands.  All of them write
// their artifacts under cfg.output_dir and return a machine-readable summary
// (JSON text).  Identical config + seed produces byte-identical files.
std::string run_ground(const ExperimentConfig& cfg);
std::string run_ramp(const ExperimentConfig& cfg);
std::string run_measure(const ExperimentConfig& cfg);
std::string run_sweep(const ExperimentConfig& cfg);

// Renders figures from report JSONs found in `reports_dir` (defaults to
// cfg.output_dir): a G-matrix heatmap with shot data in the lower and exact
// values in the upper triangle, correlation vs rung distance with
// per-distance means, and a bond-energy bar chart per ratio.
std::string run_figures(const ExperimentConfig& cfg, const std::string& reports_dir);

// Prepares the state for one ratio per cfg.mode (exact ground state or the
// emulated ramp mapped to the target frame), runs the plans, and reports.
// ratio_index feeds the per-plan seed derivation.
SweepPointResult evaluate_ratio(const ExperimentConfig& cfg, double ratio,
                                std::size_t ratio_index = 0);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// The full invariant battery (acceptance entry point).  When a config is
// given, its lattice/plans/noise are validated as additional checks.
std::vector<CheckResult> run_verify(const ExperimentConfig* cfg);

// Same battery, but loading the config file is itself the first check: a
// config that violates the schema or a model invariant (T2R > 2 T1,
// overlapping correlation pairs, ...) yields a failing check instead of a
// hard error.
std::vector<CheckResult> run_verify_file(const std::string& config_path);

std::string verify_report_json(const std::vector<CheckResult>& checks);

}  // namespace fluxladder
