#pragma once

#include <cstdint>

#include "fluxladder/engine.hpp"

namespace fluxladder {

// Per-site decoherence model.  Rates derived from measured T1 and Ramsey T2R:
//   gamma_1   = 1/T1                  (amplitude damping, jump a_j)
//   gamma_phi = 1/T2R - 1/(2 T1)      (pure dephasing, jump sqrt(2 gamma_phi) n_j)
// The dephasing operator is the number operator, normalized so the two-level
// subspace coherence decays at exactly 1/T2R.  Requires T2R <= 2 T1.
struct NoiseModel {
    std::vector<double> t1;   // seconds per site
    std::vector<double> t2r;  // seconds per site

    void validate(int n_sites) const;
    double gamma1(int site) const { return 1.0 / t1.at(static_cast<std::size_t>(site - 1)); }
    double gamma_phi(int site) const;
    bool trivial() const { return t1.empty() && t2r.empty(); }
};

// Hermitian, unit-trace density matrix over a (normally multi-sector) basis.
class DensityMatrix {
public:
    DensityMatrix() = default;
    DensityMatrix(BasisPtr basis, Eigen::MatrixXcd rho);
    static DensityMatrix pure(const StateVector& state);

    const BasisPtr& basis() const { return basis_; }
    const Eigen::MatrixXcd& matrix() const { return rho_; }
    Eigen::MatrixXcd& matrix() { return rho_; }

    double trace_real() const { return rho_.trace().real(); }
    double population(std::size_t k) const { return rho_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real(); }
    double site_population(int site) const;

    // Checks trace ~ 1, Hermiticity and positivity; throws on violation.
    void check_invariants(double trace_tol = 1e-8, double herm_tol = 1e-10,
                          double pos_tol = 1e-8) const;

private:
    BasisPtr basis_;
    Eigen::MatrixXcd rho_;
};

struct LindbladOptions {
    double rel_tol = 1e-9;      // adaptive RK45 per-step tolerance
    double trace_tol = 1e-6;    // drift beyond this is an error, not renormalized
    double max_dt_fraction = 1.0;  // cap dt at fraction of requested span
};

// Integrates drho/dt = -i[H, rho] + sum_j gamma1_j D[a_j] rho
//                      + sum_j 2 gamma_phi_j D[n_j] rho
// with the standard dissipator D[L]rho = L rho L^dag - {L^dag L, rho}/2,
// using adaptive Dormand-Prince RK45.  dt is the initial step size hint.
DensityMatrix lindblad_evolve(const DensityMatrix& rho, const SparseOperator& h,
                              const NoiseModel& model, double t_seconds, double dt,
                              const LindbladOptions& opts = {});

// Quantum-jump (Monte-Carlo wavefunction) unraveling: evolves n_traj pure
// states under the effective non-Hermitian propagator with stochastic jumps;
// the ensemble average converges to lindblad_evolve.  Errors out when the
// per-step jump probability exceeds 0.1 (dt too large).
std::vector<StateVector> trajectory_evolve(const StateVector& state, const SparseOperator& h,
                                           const NoiseModel& model, double t_seconds, double dt,
                                           int n_traj, std::uint64_t seed, int threads = 1);

// Ensemble-averaged expectation of a Hermitian operator.
double ensemble_expectation(const SparseOperator& op, std::span<const StateVector> ensemble);

// Embeds a fixed-number state into a multi-sector basis (amplitude damping
// only ever lowers the total, so max_total = the state's own total suffices).
StateVector embed_multi_sector(const StateVector& state,
                               const std::shared_ptr<const MultiSectorBasis>& multi);

// The staggered gauge of negate_map applied to a density matrix.
DensityMatrix staggered_gauge_density(const DensityMatrix& rho);

}  // namespace fluxladder
