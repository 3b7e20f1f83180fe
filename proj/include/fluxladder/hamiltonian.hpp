#pragma once

#include "fluxladder/lattice.hpp"
#include "fluxladder/operators.hpp"

namespace fluxladder {

// Full lattice Hamiltonian (in rad/s, i.e. H/hbar) on the given basis.
// Commutes with total particle number; exactly Hermitian by construction.
SparseOperator assemble(const LatticeSpec& spec, BasisPtr basis);

// Global-negation mapping: returns spec' with u -> -u, omega -> -omega and
// flux -> flux + pi (mod 2pi), coupling magnitudes unchanged, such that
// spectrum(assemble(spec')) == -spectrum(assemble(spec)) as sorted multisets.
// The flipped rung-hopping sign is absorbed by the staggered gauge
// a_j -> (-1)^j a_j, which flips nearest-neighbour hopping and preserves
// next-nearest; see staggered_gauge_state().
LatticeSpec negate_map(const LatticeSpec& spec);

// The staggered gauge unitary behind negate_map: multiplies each amplitude by
// (-1)^(sum over odd sites of n_j).  Applying it maps eigenstates of
// -assemble(spec) onto eigenstates of assemble(negate_map(spec)).
StateVector staggered_gauge_state(const StateVector& state);

// Two-site protocol Hamiltonians acting on adjacent pair (j, j+1), all other
// sites untouched.
//   beamsplitter: strength * (a_j^dag a_{j+1} + h.c.)
//   idle:         strength * (n_j - n_{j+1})
struct PairHamiltonianSpec {
    enum class Kind { beamsplitter, idle };
    Kind kind = Kind::beamsplitter;
    int pair_site = 0;      // 1-based j; pair is (j, j+1)
    double strength = 0.0;  // J_j or Delta_j, rad/s, nonzero
};

SparseOperator assemble_pair(const PairHamiltonianSpec& pair, BasisPtr basis);

}  // namespace fluxladder
