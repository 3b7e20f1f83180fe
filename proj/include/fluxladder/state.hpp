#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>

#include "fluxladder/basis.hpp"

namespace fluxladder {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;

// Complex amplitude vector over a basis.  Value type; the basis is shared.
class StateVector {
public:
    StateVector() = default;
    StateVector(BasisPtr basis, Vector amplitudes);

    // Zero state on `basis`.
    explicit StateVector(BasisPtr basis);

    const BasisPtr& basis() const { return basis_; }
    const Vector& amplitudes() const { return amp_; }
    Vector& amplitudes() { return amp_; }
    std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }

    double norm() const { return amp_.norm(); }
    StateVector& normalize();

    // Born probability of basis state k.
    double probability(std::size_t k) const { return std::norm(amp_(static_cast<Eigen::Index>(k))); }

    // <n_site> for 1-based site index.
    double site_population(int site) const;

private:
    BasisPtr basis_;
    Vector amp_;
};

// Product Fock state |occ> on the given basis; occ must be a basis state.
StateVector product_state(BasisPtr basis, const Occupation& occ);

// Standard sesquilinear inner product <x|y>; bases must match.
Complex inner(const StateVector& x, const StateVector& y);

// amplitude * a_i^dag a_j |state| with bosonic sqrt factors, 1-based sites,
// i != j.  Occupations that would exceed the cutoff are annihilated
// (projective truncation).  Result is unnormalized.
StateVector apply_hop(const StateVector& state, int i, int j, Complex amplitude);

}  // namespace fluxladder
