#pragma once

#include <cstdint>
#include <map>

#include "fluxladder/engine.hpp"
#include "fluxladder/observables.hpp"

namespace fluxladder {

// One emulated measurement setting: which rung pairs are isolated, how the
// rotation onto the readout axis is generated, and how bitstrings are drawn.
//
// During the protocol all couplings outside the plan pairs are off (pair
// isolation).  Each pair evolves under its own pair-restricted lattice
// Hamiltonian -J_j (a^dag a + h.c.), whose quarter-swap unitary at
// t_bs = pi/(4 J_j) is the sqrt(iSWAP) entangler; bond plans prepend the
// detuning rotation Delta_j (n_j - n_{j+1}) for t_idle = pi/(4 Delta_j).
// The lattice's onsite terms (omega, U) stay on during every window: the
// anharmonicity cannot be switched off, which is exactly why the population
// estimators are exact only in the hard-core limit.
struct MeasurementPlan {
    enum class Kind { current, current_correlation, bond_kinetic };
    enum class Readout { occupancy, binary };

    Kind kind = Kind::current;
    std::vector<int> pairs;  // 1-based rung indices; one, or two disjoint
    std::uint64_t shots = 1;
    std::uint64_t seed = 0;
    Readout readout = Readout::occupancy;
    std::vector<double> t_bs;  // seconds, one per pair; 0 = use pi/(4 J_j)
    double t_idle = 0.0;       // seconds, bond mode; 0 = use pi/(4 Delta)
    double delta = 0.0;        // rad/s, bond mode idle detuning

    void validate(int n_sites) const;
};

// Counts of measured occupation strings.
struct ShotTable {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;
    std::uint64_t seed = 0;
    MeasurementPlan plan;

    std::string csv() const;  // "bitstring,count" rows, lexicographic
};

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Analytic beamsplitter time pi/(4J).
double calibrate_tbs(double j_rung);

// Extracts t_bs from a simulated population trace n_1(t) of a resonant
// two-site swap by least-squares sinusoid fit; returns the quarter period.
// The trace must cover at least half an oscillation.
double fit_tbs_from_trace(std::span<const double> times, std::span<const double> populations);

// Simulated two-site swap trace (population of the first site starting from
// |10>), the input fit_tbs_from_trace is calibrated on.
std::vector<double> beamsplitter_trace(double j_rung, std::span<const double> times);

// Applies the plan's pre-measurement unitary (idle rotation for bond plans,
// then per-pair beamsplitters) with every coupling outside the plan off.
StateVector apply_protocol(const StateVector& state, const MeasurementPlan& plan,
                           const LatticeSpec& spec);

// The plan's unitary as timed Hamiltonian windows.  Simultaneous
// beamsplitters with different calibrated times split into sub-windows,
// dropping each pair once its own time has elapsed; the idle rotation of
// bond plans is the first window.  The open-system pipeline evolves a
// density matrix through the same windows.
struct ProtocolWindow {
    SparseOperator hamiltonian;
    double duration = 0.0;
};
std::vector<ProtocolWindow> protocol_windows(const MeasurementPlan& plan, const LatticeSpec& spec,
                                             BasisPtr basis);

// The onsite diagonal sum_j omega_j n_j + (u_j/2) n_j (n_j - 1) that stays
// on during protocol windows.
SparseOperator onsite_diagonal(const LatticeSpec& spec, BasisPtr basis);

// Projective readout: draws plan.shots occupation strings with Born
// probabilities, deterministic for a given seed.  Binary readout clips each
// digit at 1 (hardware discriminates only |0> / |1>).
ShotTable sample(const StateVector& state, const MeasurementPlan& plan);

// Same draw from an explicit probability vector over the basis (the
// density-matrix readout path).
ShotTable sample_probabilities(const BasisBase& basis, std::span<const double> probs,
                               const MeasurementPlan& plan);

// Shot-based estimators, Eq.-of-motion convention J_hat = J (n_j - n_{j+1})
// evaluated at the beamsplitter time; exact in the hard-core limit.
Estimate estimate_current(const ShotTable& table, int pair, double j_rung);
Estimate estimate_current_correlation(const ShotTable& table, int pair_i, int pair_j,
                                      double j_i, double j_j);
// sign_convention (+1/-1) fixes the idle rotation direction; see
// calibrate_bond_sign().
Estimate estimate_bond_kinetic(const ShotTable& table, int pair, int sign_convention);

// Infinite-shot variants: estimators evaluated on exact post-protocol
// populations, separating protocol bias from shot noise.
double estimate_current_exact(const StateVector& post_state, int pair, double j_rung,
                              MeasurementPlan::Readout readout = MeasurementPlan::Readout::occupancy);
double estimate_current_correlation_exact(const StateVector& post_state, int pair_i, int pair_j,
                                          double j_i, double j_j,
                                          MeasurementPlan::Readout readout = MeasurementPlan::Readout::occupancy);
double estimate_bond_kinetic_exact(const StateVector& post_state, int pair, int sign_convention,
                                   MeasurementPlan::Readout readout = MeasurementPlan::Readout::occupancy);

// Software calibration run: applies the bond protocol with the given idle
// detuning to the known two-site state (|10> + |01>)/sqrt(2) (O_j = +1) and
// returns the sign that makes the estimator reproduce it.  The rotation
// direction depends only on sign(delta).
int calibrate_bond_sign(double delta);

}  // namespace fluxladder
