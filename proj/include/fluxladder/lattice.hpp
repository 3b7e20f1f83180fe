#pragma once

#include <vector>

namespace fluxladder {

// Parameters of the triangular-ladder Bose-Hubbard Hamiltonian
//
//   H/hbar =  sum_j  omega_j n_j + (u_j/2) n_j (n_j - 1)
//           - sum_j  j_rung_j (a_j^dag a_{j+1} + h.c.)
//           + sum_j  j_leg_j  (a_j^dag a_{j+2} e^{i flux} + h.c.)
//
// Sites are numbered 1..n_sites (stored 0-based).  Rung couplings connect
// nearest neighbours (j, j+1); leg couplings connect next-nearest neighbours
// (j, j+2).  Couplings are positive magnitudes in rad/s; the Peierls phase
// sits entirely on the leg hopping, so flux = 0 or pi selects the sign of the
// physical leg coupling.  Any real flux is accepted.
struct LatticeSpec {
    int n_sites = 0;
    std::vector<double> omega;   // onsite angular frequency per site, rad/s
    std::vector<double> u;       // onsite interaction per site, rad/s
    std::vector<double> j_rung;  // n_sites-1 rung hoppings, > 0, rad/s
    std::vector<double> j_leg;   // n_sites-2 leg hopping magnitudes, > 0, rad/s
    double flux = 0.0;           // plaquette phase, radians
    int n_max = 1;               // boson cutoff per site, >= 1

    // Mean rung coupling; the unit in which currents are reported.
    double mean_rung() const;

    // Throws Error(invalid_argument) if any invariant is violated.
    void validate() const;
};

// The stored `flux` is the Peierls phase on the leg term.  The
// gauge-invariant flux through each triangular plaquette differs from it by
// pi: the two rung terms each enter the kinetic matrix with sign -1, the leg
// with +e^{i flux}, so the loop product carries an extra factor of -1.
// Figure-style flux labels (0 for positive leg ratios, pi for negative ones)
// refer to the plaquette flux.
double leg_phase_for_plaquette_flux(double plaquette_flux);
double plaquette_flux_for_leg_phase(double leg_phase);

// Uniform-coupling spec: all rungs at `j`, all legs at |ratio|*j, omega and
// u zero.  The sign of `leg_ratio` selects the plaquette flux (pi for
// negative ratios), which fixes the stored leg phase.
LatticeSpec uniform_spec(int n_sites, double j, double leg_ratio, int n_max);

}  // namespace fluxladder
