#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fluxladder/lattice.hpp"
#include "fluxladder/noise.hpp"
#include "fluxladder/protocol.hpp"

namespace fluxladder {

// Parsed experiment configuration.  The on-disk format is versioned JSON
// (see docs/config.md); frequencies are given as value/2pi in MHz, times in
// ns or us, and are converted to rad/s and seconds here.
struct ExperimentConfig {
    enum class Mode { exact_ground, ramp_prepared };

    int schema_version = 1;
    LatticeSpec lattice;       // target-frame spec at the base leg ratio
    double base_ratio = 1.0;
    int total_number = 0;
    Mode mode = Mode::exact_ground;
    std::vector<double> sweep_ratios;
    // plaquette flux, radians; default infers pi (ratio < 0) / 0 (ratio > 0)
    std::optional<double> flux_override;

    struct RampConfig {
        std::vector<int> excited_sites;   // 1-based
        double park_detuning = 0.0;       // rad/s, applied to non-excited sites
        double duration_s = 0.0;
        RampSegment::Shape shape = RampSegment::Shape::linear;
        double dt_s = 1e-10;
    };
    std::optional<RampConfig> ramp;

    std::vector<MeasurementPlan> plans;
    std::optional<NoiseModel> noise;
    double lindblad_rel_tol = 1e-8;

    std::string output_dir = "out";
    std::uint64_t seed = 1;
    std::uint64_t default_shots = 100000;
    int threads = 1;

    // Canonical JSON this config was parsed from (defaults filled in).
    std::string canonical_json;
    // FNV-1a hash of canonical_json, hex; embedded in every output file.
    std::string hash;

    // Target spec at a given leg ratio: legs at |ratio| * mean rung coupling,
    // flux pi for ratio < 0 and 0 for ratio > 0 unless overridden.
    LatticeSpec spec_for_ratio(double ratio) const;
};

// Parse + validate.  Unknown keys, wrong types, missing version or
// out-of-range values are config errors with the offending key named.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Built-in default: the 8-site, half-filling, hard-core six-ratio sweep.
ExperimentConfig default_config();
std::string default_config_json();

}  // namespace fluxladder
