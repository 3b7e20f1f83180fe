#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>

#include "fluxladder/state.hpp"

namespace fluxladder {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

// Sparse operator in an occupation basis.  Hermitian operators are assembled
// so that value(r,c) == conj(value(c,r)) exactly; explicit zeros are pruned.
class SparseOperator {
public:
    SparseOperator() = default;
    SparseOperator(BasisPtr basis, std::vector<Triplet> triplets, bool hermitian);

    const BasisPtr& basis() const { return basis_; }
    const SparseMatrix& matrix() const { return mat_; }
    bool hermitian() const { return hermitian_; }
    // True when every stored entry is purely real (real symmetric operator).
    bool is_real() const { return real_; }
    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }

    StateVector apply(const StateVector& v) const;
    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(mat_); }

    // Largest |entry|; cheap operator scale used in tolerances.
    double max_abs() const;

    SparseOperator& operator+=(const SparseOperator& other);
    SparseOperator scaled(Complex factor) const;

    // Triplet text, one "row col re im" line per stored entry, row-major.
    void write_triplets(std::ostream& os) const;

private:
    BasisPtr basis_;
    SparseMatrix mat_;
    bool hermitian_ = false;
    bool real_ = false;
};

// <x|op|y>-style expectation <state|op|state>.  For Hermitian op the
// imaginary part is a roundoff check, not information.
Complex expectation(const SparseOperator& op, const StateVector& state);
double real_expectation(const SparseOperator& op, const StateVector& state);

// Elementary Hermitian pieces, 1-based site/rung indices.
SparseOperator number_operator(BasisPtr basis, int site);
// strength * (a_i^dag a_j e^{i phase} + a_j^dag a_i e^{-i phase})
SparseOperator hopping_operator(BasisPtr basis, int i, int j, double strength, double phase);
// Identity on the basis.
SparseOperator identity_operator(BasisPtr basis);

// Particle-number current on rung (j, j+1):
//   J_j = i j_rung_j (a_j^dag a_{j+1} - a_{j+1}^dag a_j),
// so <J_j> = 2 j_rung_j Im<a_j^dag a_{j+1}>.
SparseOperator current_operator(int rung, const struct LatticeSpec& spec, BasisPtr basis);

// Bond (kinetic) operator B_j = a_j^dag a_{j+1} + a_{j+1}^dag a_j.
SparseOperator bond_operator(int rung, BasisPtr basis);

// Number-lowering operator a_site on a multi-sector basis (mixes sectors).
SparseOperator lowering_operator(BasisPtr basis, int site);

}  // namespace fluxladder
