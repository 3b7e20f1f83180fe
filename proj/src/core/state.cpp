#include "fluxladder/state.hpp"

#include <cmath>

#include "fluxladder/errors.hpp"

namespace fluxladder {

StateVector::StateVector(BasisPtr basis, Vector amplitudes)
    : basis_(std::move(basis)), amp_(std::move(amplitudes)) {
    if (!basis_) throw_invalid("StateVector: null basis");
    if (static_cast<std::size_t>(amp_.size()) != basis_->dim())
        throw_mismatch("StateVector: amplitude count does not match basis dimension");
}

StateVector::StateVector(BasisPtr basis) : basis_(std::move(basis)) {
    if (!basis_) throw_invalid("StateVector: null basis");
    amp_ = Vector::Zero(static_cast<Eigen::Index>(basis_->dim()));
}

StateVector& StateVector::normalize() {
    const double n = amp_.norm();
    if (n == 0.0) throw_numeric("normalize: zero state");
    amp_ /= n;
    return *this;
}

double StateVector::site_population(int site) const {
    if (site < 1 || site > basis_->n_sites()) throw_invalid("site_population: site out of range");
    double pop = 0.0;
    for (std::size_t k = 0; k < dim(); ++k) {
        const double p = probability(k);
        if (p == 0.0) continue;
        pop += p * static_cast<double>(basis_->state(k)[static_cast<std::size_t>(site - 1)]);
    }
    return pop;
}

StateVector product_state(BasisPtr basis, const Occupation& occ) {
    auto idx = basis->find(occ);
    if (!idx) throw_invalid("product_state: occupation not in basis");
    StateVector psi(std::move(basis));
    psi.amplitudes()(static_cast<Eigen::Index>(*idx)) = 1.0;
    return psi;
}

Complex inner(const StateVector& x, const StateVector& y) {
    if (!same_basis(*x.basis(), *y.basis())) throw_mismatch("inner: basis mismatch");
    return x.amplitudes().dot(y.amplitudes());
}

StateVector apply_hop(const StateVector& state, int i, int j, Complex amplitude) {
    const auto& basis = *state.basis();
    const int n_sites = basis.n_sites();
    if (i < 1 || i > n_sites || j < 1 || j > n_sites) throw_invalid("apply_hop: site out of range");
    if (i == j) throw_invalid("apply_hop: sites must differ");

    StateVector out(state.basis());
    Occupation scratch(static_cast<std::size_t>(n_sites));
    const auto si = static_cast<std::size_t>(i - 1);
    const auto sj = static_cast<std::size_t>(j - 1);
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const Complex a = state.amplitudes()(static_cast<Eigen::Index>(k));
        if (a == Complex(0.0)) continue;
        auto occ = basis.state(k);
        const int nj = occ[sj];
        const int ni = occ[si];
        if (nj == 0) continue;                // annihilation kills the state
        if (ni + 1 > basis.n_max()) continue; // cutoff: projective truncation
        std::copy(occ.begin(), occ.end(), scratch.begin());
        scratch[sj] = static_cast<std::uint8_t>(nj - 1);
        scratch[si] = static_cast<std::uint8_t>(ni + 1);
        auto idx = basis.find(scratch);
        if (!idx) continue;  // outside a fixed-number basis (sector change)
        const double factor = std::sqrt(static_cast<double>(nj) * static_cast<double>(ni + 1));
        out.amplitudes()(static_cast<Eigen::Index>(*idx)) += amplitude * factor * a;
    }
    return out;
}

}  // namespace fluxladder
