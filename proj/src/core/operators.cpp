#include "fluxladder/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "fluxladder/errors.hpp"
#include "fluxladder/lattice.hpp"
#include "fluxladder/util.hpp"

namespace fluxladder {

namespace {

// Appends amplitude * a_i^dag a_j + conj(amplitude) * a_j^dag a_i (0-based
// sites) to the triplet list: both directions together so Hermiticity holds
// entry-by-entry, with the cutoff handled symmetrically.
void add_hop_terms(const BasisBase& basis, std::size_t si, std::size_t sj, Complex amplitude,
                   std::vector<Triplet>& out) {
    Occupation scratch(static_cast<std::size_t>(basis.n_sites()));
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
        const auto row = static_cast<int>(*idx);
        const auto col = static_cast<int>(k);
        out.emplace_back(row, col, amplitude * factor);
        out.emplace_back(col, row, std::conj(amplitude) * factor);
    }
}

void add_diagonal_terms(const BasisBase& basis, const std::function<double(std::span<const std::uint8_t>)>& f,
                        std::vector<Triplet>& out) {
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const double v = f(basis.state(k));
        if (v != 0.0) out.emplace_back(static_cast<int>(k), static_cast<int>(k), Complex(v, 0.0));
    }
}

}  // namespace

SparseOperator::SparseOperator(BasisPtr basis, std::vector<Triplet> triplets, bool hermitian)
    : basis_(std::move(basis)), hermitian_(hermitian) {
    if (!basis_) throw_invalid("SparseOperator: null basis");
    const auto n = static_cast<Eigen::Index>(basis_->dim());
    mat_.resize(n, n);
    mat_.setFromTriplets(triplets.begin(), triplets.end());
    mat_.prune([](const Eigen::Index&, const Eigen::Index&, const Complex& v) {
        return v != Complex(0.0);
    });
    mat_.makeCompressed();
    real_ = true;
    for (int k = 0; k < mat_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(mat_, k); it; ++it)
            if (it.value().imag() != 0.0) {
                real_ = false;
                break;
            }
}

StateVector SparseOperator::apply(const StateVector& v) const {
    if (!same_basis(*basis_, *v.basis())) throw_mismatch("SparseOperator::apply: basis mismatch");
    return StateVector(v.basis(), mat_ * v.amplitudes());
}

double SparseOperator::max_abs() const {
    double m = 0.0;
    for (int k = 0; k < mat_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(mat_, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

SparseOperator& SparseOperator::operator+=(const SparseOperator& other) {
    if (!same_basis(*basis_, *other.basis_)) throw_mismatch("SparseOperator +=: basis mismatch");
    mat_ += other.mat_;
    hermitian_ = hermitian_ && other.hermitian_;
    real_ = real_ && other.real_;
    return *this;
}

SparseOperator SparseOperator::scaled(Complex factor) const {
    SparseOperator out(*this);
    out.mat_ *= factor;
    if (factor.imag() != 0.0) {
        out.real_ = false;
        out.hermitian_ = false;
    }
    return out;
}

void SparseOperator::write_triplets(std::ostream& os) const {
    for (int k = 0; k < mat_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(mat_, k); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << fmt_double(it.value().real()) << ' '
               << fmt_double(it.value().imag()) << '\n';
}

Complex expectation(const SparseOperator& op, const StateVector& state) {
    if (!same_basis(*op.basis(), *state.basis())) throw_mismatch("expectation: basis mismatch");
    return state.amplitudes().dot(op.matrix() * state.amplitudes());
}

double real_expectation(const SparseOperator& op, const StateVector& state) {
    const Complex v = expectation(op, state);
    // roundoff in the imaginary part scales with the operator norm
    const double scale = std::max(1.0, op.max_abs() * static_cast<double>(op.dim()));
    if (op.hermitian() && std::abs(v.imag()) > 1e-10 * scale)
        throw_numeric("real_expectation: imaginary part too large for a Hermitian operator");
    return v.real();
}

SparseOperator number_operator(BasisPtr basis, int site) {
    if (site < 1 || site > basis->n_sites()) throw_invalid("number_operator: site out of range");
    std::vector<Triplet> trips;
    const auto s = static_cast<std::size_t>(site - 1);
    add_diagonal_terms(*basis, [s](std::span<const std::uint8_t> occ) {
        return static_cast<double>(occ[s]);
    }, trips);
    return SparseOperator(std::move(basis), std::move(trips), true);
}

SparseOperator hopping_operator(BasisPtr basis, int i, int j, double strength, double phase) {
    const int n = basis->n_sites();
    if (i < 1 || i > n || j < 1 || j > n || i == j)
        throw_invalid("hopping_operator: invalid site pair");
    std::vector<Triplet> trips;
    const Complex amp = strength * std::polar(1.0, phase);
    add_hop_terms(*basis, static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), amp,
                  trips);
    return SparseOperator(std::move(basis), std::move(trips), true);
}

SparseOperator identity_operator(BasisPtr basis) {
    std::vector<Triplet> trips;
    trips.reserve(basis->dim());
    for (std::size_t k = 0; k < basis->dim(); ++k)
        trips.emplace_back(static_cast<int>(k), static_cast<int>(k), Complex(1.0, 0.0));
    return SparseOperator(std::move(basis), std::move(trips), true);
}

SparseOperator current_operator(int rung, const LatticeSpec& spec, BasisPtr basis) {
    if (rung < 1 || rung > spec.n_sites - 1) throw_invalid("current_operator: rung out of range");
    // i J (a_j^dag a_{j+1} - h.c.) == J (e^{i pi/2} a_j^dag a_{j+1} + h.c.)
    const double j = spec.j_rung[static_cast<std::size_t>(rung - 1)];
    return hopping_operator(std::move(basis), rung, rung + 1, j, M_PI / 2.0);
}

SparseOperator bond_operator(int rung, BasisPtr basis) {
    if (rung < 1 || rung > basis->n_sites() - 1) throw_invalid("bond_operator: rung out of range");
    return hopping_operator(std::move(basis), rung, rung + 1, 1.0, 0.0);
}

SparseOperator lowering_operator(BasisPtr basis, int site) {
    if (site < 1 || site > basis->n_sites()) throw_invalid("lowering_operator: site out of range");
    std::vector<Triplet> trips;
    const auto s = static_cast<std::size_t>(site - 1);
    Occupation scratch(static_cast<std::size_t>(basis->n_sites()));
    for (std::size_t k = 0; k < basis->dim(); ++k) {
        auto occ = basis->state(k);
        const int ns = occ[s];
        if (ns == 0) continue;
        std::copy(occ.begin(), occ.end(), scratch.begin());
        scratch[s] = static_cast<std::uint8_t>(ns - 1);
        auto idx = basis->find(scratch);
        if (!idx) continue;  // fixed-number basis: a_j has no image
        trips.emplace_back(static_cast<int>(*idx), static_cast<int>(k),
                           Complex(std::sqrt(static_cast<double>(ns)), 0.0));
    }
    return SparseOperator(std::move(basis), std::move(trips), false);
}

}  // namespace fluxladder
