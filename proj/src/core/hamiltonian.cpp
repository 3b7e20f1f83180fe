#include "fluxladder/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "fluxladder/errors.hpp"

namespace fluxladder {

namespace {

void append_hop(const BasisBase& basis, int site_i, int site_j, Complex amplitude,
                std::vector<Triplet>& out) {
    // amplitude * a_i^dag a_j + h.c., 1-based sites.
    Occupation scratch(static_cast<std::size_t>(basis.n_sites()));
    const auto si = static_cast<std::size_t>(site_i - 1);
    const auto sj = static_cast<std::size_t>(site_j - 1);
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        auto occ = basis.state(k);
        const int nj = occ[sj];
        const int ni = occ[si];
        if (nj == 0 || ni + 1 > basis.n_max()) continue;
        std::copy(occ.begin(), occ.end(), scratch.begin());
        scratch[sj] = static_cast<std::uint8_t>(nj - 1);
        scratch[si] = static_cast<std::uint8_t>(ni + 1);
        auto idx = basis.find(scratch);
        if (!idx) continue;
        const double factor = std::sqrt(static_cast<double>(nj) * static_cast<double>(ni + 1));
        out.emplace_back(static_cast<int>(*idx), static_cast<int>(k), amplitude * factor);
        out.emplace_back(static_cast<int>(k), static_cast<int>(*idx),
                         std::conj(amplitude) * factor);
    }
}

}  // namespace

SparseOperator assemble(const LatticeSpec& spec, BasisPtr basis) {
    spec.validate();
    if (basis->n_sites() != spec.n_sites)
        throw_mismatch("assemble: basis and spec disagree on n_sites");
    if (basis->n_max() != spec.n_max)
        throw_mismatch("assemble: basis and spec disagree on n_max");

    std::vector<Triplet> trips;
    const int n = spec.n_sites;

    // onsite: omega_j n_j + (u_j/2) n_j (n_j - 1)
    for (std::size_t k = 0; k < basis->dim(); ++k) {
        auto occ = basis->state(k);
        double diag = 0.0;
        for (int s = 0; s < n; ++s) {
            const double ns = occ[static_cast<std::size_t>(s)];
            diag += spec.omega[static_cast<std::size_t>(s)] * ns +
                    0.5 * spec.u[static_cast<std::size_t>(s)] * ns * (ns - 1.0);
        }
        if (diag != 0.0)
            trips.emplace_back(static_cast<int>(k), static_cast<int>(k), Complex(diag, 0.0));
    }

    // rungs: - J_j (a_j^dag a_{j+1} + h.c.)
    for (int j = 1; j <= n - 1; ++j)
        append_hop(*basis, j, j + 1, Complex(-spec.j_rung[static_cast<std::size_t>(j - 1)], 0.0),
                   trips);

    // legs: + Jl_j (a_j^dag a_{j+2} e^{i flux} + h.c.)
    const Complex leg_phase = std::polar(1.0, spec.flux);
    for (int j = 1; j <= n - 2; ++j)
        append_hop(*basis, j, j + 2, spec.j_leg[static_cast<std::size_t>(j - 1)] * leg_phase,
                   trips);

    return SparseOperator(std::move(basis), std::move(trips), true);
}

LatticeSpec negate_map(const LatticeSpec& spec) {
    LatticeSpec out = spec;
    for (double& w : out.omega) w = -w;
    for (double& v : out.u) v = -v;
    out.flux = std::remainder(spec.flux + M_PI, 2.0 * M_PI);
    return out;
}

StateVector staggered_gauge_state(const StateVector& state) {
    StateVector out(state.basis(), state.amplitudes());
    const auto& basis = *state.basis();
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        auto occ = basis.state(k);
        int parity = 0;
        for (std::size_t s = 1; s < occ.size(); s += 2) parity += occ[s];  // sites 2, 4, ...
        if (parity & 1) out.amplitudes()(static_cast<Eigen::Index>(k)) *= -1.0;
    }
    return out;
}

SparseOperator assemble_pair(const PairHamiltonianSpec& pair, BasisPtr basis) {
    const int n = basis->n_sites();
    if (pair.pair_site < 1 || pair.pair_site + 1 > n)
        throw_invalid("assemble_pair: pair must be adjacent sites inside the lattice");
    if (pair.strength == 0.0) throw_invalid("assemble_pair: strength must be nonzero");

    std::vector<Triplet> trips;
    if (pair.kind == PairHamiltonianSpec::Kind::beamsplitter) {
        append_hop(*basis, pair.pair_site, pair.pair_site + 1, Complex(pair.strength, 0.0), trips);
    } else {
        // idle: strength * (n_j - n_{j+1})
        const auto sj = static_cast<std::size_t>(pair.pair_site - 1);
        for (std::size_t k = 0; k < basis->dim(); ++k) {
            auto occ = basis->state(k);
            const double d = static_cast<double>(occ[sj]) - static_cast<double>(occ[sj + 1]);
            if (d != 0.0)
                trips.emplace_back(static_cast<int>(k), static_cast<int>(k),
                                   Complex(pair.strength * d, 0.0));
        }
    }
    return SparseOperator(std::move(basis), std::move(trips), true);
}

}  // namespace fluxladder
