#pragma once

#include <functional>
#include <optional>

#include "fluxladder/hamiltonian.hpp"

namespace fluxladder {

// Lowest eigenpair plus degeneracy information.  When the gap to the next
// eigenvalue is below degeneracy_tol * ||H|| the solver flags the result and
// also returns the partner state, so callers can handle the two-dimensional
// manifold explicitly instead of silently mixing it.
struct EigenPair {
    double energy = 0.0;
    StateVector state;
    bool degenerate = false;
    std::optional<double> partner_energy;
    std::optional<StateVector> partner_state;
};

struct EigenOptions {
    double degeneracy_tol = 1e-8;   // relative to operator scale
    std::size_t dense_cutoff = 2000;  // dense solver up to this dimension
    int lanczos_max_iter = 500;
    double lanczos_tol = 1e-12;
};

// Lowest eigenpair of a Hermitian operator.  Dense solve below the cutoff,
// Lanczos with full reorthogonalization above.  Residual ||H psi - E psi||
// is verified against 1e-10 * ||H||; real symmetric operators take a real
// solver path, so their eigenvectors come out real (time-reversal even).
EigenPair ground_state(const SparseOperator& op, const EigenOptions& opts = {});

// Highest eigenpair of assemble(spec): ground state of the negated spec,
// energy negated and the staggered gauge applied to the vector.
EigenPair top_state(const LatticeSpec& spec, BasisPtr basis, const EigenOptions& opts = {});

// Explicit access to the two chiral-sector states of a flagged degenerate
// doublet: for a real (time-reversal-even) pair psi_1, psi_2 these are
// (psi_1 +- i psi_2)/sqrt(2), carrying opposite currents.  Observables on
// degenerate manifolds default to the real combination the solver returns.
std::pair<StateVector, StateVector> chiral_combinations(const EigenPair& pair);

// All eigenvalues, ascending (dense path only).
std::vector<double> spectrum(const SparseOperator& op);

// exp(-i H t) |state|.  Dense eigendecomposition below `dense cutoff`
// dimensions, Lanczos-Krylov stepping above.  Norm drift <= 1e-10, total
// number conserved exactly (H never mixes sectors).
struct EvolveOptions {
    std::size_t dense_cutoff = 500;
    int krylov_dim = 30;
    double krylov_tol = 1e-12;
};
StateVector evolve(const StateVector& state, const SparseOperator& h, double t_seconds,
                   const EvolveOptions& opts = {});

// Krylov-only variant taking an arbitrary Hermitian matvec; used by the ramp
// integrator where H changes every step.
StateVector evolve_krylov(const StateVector& state,
                          const std::function<Vector(const Vector&)>& matvec, double t_seconds,
                          int krylov_dim = 30, double tol = 1e-12);

// State-preparation ramp schedule.  Each segment interpolates per-site
// detunings (added to spec.omega) over its duration; hoppings stay fixed.
struct RampSegment {
    enum class Shape { step, linear, cosine };
    double duration_s = 0.0;
    std::vector<double> detuning_start;  // rad/s, one per site
    std::vector<double> detuning_end;
    Shape shape = Shape::linear;
};

struct RampSchedule {
    std::vector<RampSegment> segments;
    Occupation initial_occupations;
    double dt = 1e-10;  // integrator step, seconds
};

// Segment interpolation at fractional position frac in [0, 1].
double ramp_shape_value(RampSegment::Shape shape, double start, double end, double frac);

struct RampResult {
    StateVector state;
    std::optional<double> fidelity;  // |<state|target>|^2 when target given
};

// Integrates the time-dependent Hamiltonian with second-order midpoint
// piecewise-constant exponential steps.  Detunings enter only the diagonal,
// so each step reuses the fixed kinetic part.
RampResult evolve_ramp(const RampSchedule& schedule, const LatticeSpec& spec, BasisPtr basis,
                       const StateVector* target = nullptr);

}  // namespace fluxladder
