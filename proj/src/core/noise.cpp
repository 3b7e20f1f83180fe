#include "fluxladder/noise.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "fluxladder/errors.hpp"
#include "fluxladder/util.hpp"

namespace fluxladder {

void NoiseModel::validate(int n_sites) const {
    const auto n = static_cast<std::size_t>(n_sites);
    if (t1.size() != n) throw_invalid("noise: t1 must have n_sites entries");
    if (t2r.size() != n) throw_invalid("noise: t2r must have n_sites entries");
    for (std::size_t s = 0; s < n; ++s) {
        if (!(t1[s] > 0.0)) throw_invalid("noise: T1 must be > 0");
        if (!(t2r[s] > 0.0)) throw_invalid("noise: T2R must be > 0");
        if (t2r[s] > 2.0 * t1[s] * (1.0 + 1e-12))
            throw_invalid("noise: T2R must not exceed 2*T1 (pure dephasing rate would be negative)");
    }
}

double NoiseModel::gamma_phi(int site) const {
    const auto s = static_cast<std::size_t>(site - 1);
    return std::max(0.0, 1.0 / t2r.at(s) - 0.5 / t1.at(s));
}

DensityMatrix::DensityMatrix(BasisPtr basis, Eigen::MatrixXcd rho)
    : basis_(std::move(basis)), rho_(std::move(rho)) {
    if (!basis_) throw_invalid("DensityMatrix: null basis");
    if (rho_.rows() != rho_.cols() ||
        static_cast<std::size_t>(rho_.rows()) != basis_->dim())
        throw_mismatch("DensityMatrix: matrix does not match basis dimension");
}

DensityMatrix DensityMatrix::pure(const StateVector& state) {
    return DensityMatrix(state.basis(),
                         state.amplitudes() * state.amplitudes().adjoint());
}

double DensityMatrix::site_population(int site) const {
    if (site < 1 || site > basis_->n_sites())
        throw_invalid("DensityMatrix::site_population: site out of range");
    double pop = 0.0;
    for (std::size_t k = 0; k < basis_->dim(); ++k)
        pop += population(k) * static_cast<double>(basis_->state(k)[static_cast<std::size_t>(site - 1)]);
    return pop;
}

void DensityMatrix::check_invariants(double trace_tol, double herm_tol, double pos_tol) const {
    if (std::abs(trace_real() - 1.0) > trace_tol)
        throw_numeric("density matrix: trace drifted from 1");
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol) throw_numeric("density matrix: Hermiticity lost");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho_ + rho_.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -pos_tol)
        throw_numeric("density matrix: negative eigenvalue beyond tolerance");
}

namespace {

// Precomputed Lindblad structure: damping jumps stay sparse; the anticommutator
// and dephasing parts collapse into one elementwise decay matrix since number
// operators are diagonal:
//   sum_j gamma1_j ({n_j, rho}/2)_kl + 2 gamma_phi_j (n_j^2 rho/2 + rho n_j^2/2 - n_j rho n_j)_kl
//     = decay_kl * rho_kl,
//   decay_kl = sum_j gamma1_j (n_j(k)+n_j(l))/2 + gamma_phi_j (n_j(k)-n_j(l))^2.
struct LindbladTerms {
    std::vector<SparseMatrix> jumps;    // sqrt(gamma1_j) a_j
    Eigen::MatrixXd decay;              // elementwise
    Eigen::VectorXd heff_diag;          // -(i/2) sum L^dag L, stored real
};

LindbladTerms build_terms(const BasisBase& basis, const NoiseModel& model) {
    const int n = basis.n_sites();
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    LindbladTerms t;
    Eigen::MatrixXd occ(dim, n);
    for (Eigen::Index k = 0; k < dim; ++k) {
        auto state = basis.state(static_cast<std::size_t>(k));
        for (int s = 0; s < n; ++s) occ(k, s) = state[static_cast<std::size_t>(s)];
    }

    t.decay = Eigen::MatrixXd::Zero(dim, dim);
    t.heff_diag = Eigen::VectorXd::Zero(dim);
    for (int s = 1; s <= n; ++s) {
        const double g1 = model.gamma1(s);
        const double gphi = model.gamma_phi(s);
        const Eigen::VectorXd nj = occ.col(s - 1);
        for (Eigen::Index k = 0; k < dim; ++k)
            for (Eigen::Index l = 0; l < dim; ++l) {
                const double d = nj(k) - nj(l);
                t.decay(k, l) += 0.5 * g1 * (nj(k) + nj(l)) + gphi * d * d;
            }
        t.heff_diag += 0.5 * g1 * nj + gphi * nj.cwiseProduct(nj);
    }
    return t;
}

std::vector<SparseMatrix> build_jumps(BasisPtr basis, const NoiseModel& model) {
    std::vector<SparseMatrix> jumps;
    for (int s = 1; s <= basis->n_sites(); ++s) {
        const double g1 = model.gamma1(s);
        if (g1 == 0.0) continue;
        SparseOperator a = lowering_operator(basis, s);
        jumps.push_back(SparseMatrix(std::sqrt(g1) * a.matrix()));
    }
    return jumps;
}

}  // namespace

DensityMatrix lindblad_evolve(const DensityMatrix& rho0, const SparseOperator& h,
                              const NoiseModel& model, double t_seconds, double dt,
                              const LindbladOptions& opts) {
    if (!h.hermitian()) throw_invalid("lindblad_evolve: Hamiltonian must be Hermitian");
    if (!same_basis(*rho0.basis(), *h.basis()))
        throw_mismatch("lindblad_evolve: basis mismatch");
    model.validate(rho0.basis()->n_sites());
    if (t_seconds < 0.0) throw_invalid("lindblad_evolve: negative time");
    if (t_seconds == 0.0) return rho0;
    if (!(dt > 0.0)) throw_invalid("lindblad_evolve: dt must be > 0");

    const LindbladTerms terms = build_terms(*rho0.basis(), model);
    const std::vector<SparseMatrix> jumps = build_jumps(rho0.basis(), model);
    const auto& hm = h.matrix();

    const auto rhs = [&](const Eigen::MatrixXcd& r) -> Eigen::MatrixXcd {
        Eigen::MatrixXcd d = Complex(0.0, -1.0) * (hm * r - r * hm);
        d -= terms.decay.cast<Complex>().cwiseProduct(r);
        for (const auto& a : jumps) d += a * r * a.adjoint();
        return d;
    };

    // Dormand-Prince RK45 with local error controlled per unit time so the
    // global error tracks rel_tol.
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    Eigen::MatrixXcd r = rho0.matrix();
    double t = 0.0;
    double h_step = std::min(dt, t_seconds * opts.max_dt_fraction);
    int rejected_in_a_row = 0;
    while (t < t_seconds) {
        h_step = std::min(h_step, t_seconds - t);
        const Eigen::MatrixXcd k1 = rhs(r);
        const Eigen::MatrixXcd k2 = rhs(r + h_step * a21 * k1);
        const Eigen::MatrixXcd k3 = rhs(r + h_step * (a31 * k1 + a32 * k2));
        const Eigen::MatrixXcd k4 = rhs(r + h_step * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::MatrixXcd k5 = rhs(r + h_step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::MatrixXcd k6 =
            rhs(r + h_step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Eigen::MatrixXcd r5 = r + h_step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::MatrixXcd k7 = rhs(r5);
        const double err =
            (h_step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).cwiseAbs().maxCoeff();
        const double tol = opts.rel_tol * std::max(1.0, r.cwiseAbs().maxCoeff()) *
                           (h_step / t_seconds);
        if (err <= tol) {
            r = std::move(r5);
            t += h_step;
            rejected_in_a_row = 0;
            const double drift = std::abs(r.trace().real() - 1.0);
            if (drift > opts.trace_tol)
                throw_numeric(
                    "lindblad_evolve: trace drift exceeded tolerance; use a smaller dt or looser "
                    "rel_tol");
        } else if (++rejected_in_a_row > 60) {
            throw_numeric("lindblad_evolve: step size underflow");
        }
        const double factor =
            err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 2.0;
        h_step *= std::clamp(factor, 0.2, 2.0);
        if (!(h_step > 0.0) || !std::isfinite(h_step))
            throw_numeric("lindblad_evolve: step size underflow");
    }

    return DensityMatrix(rho0.basis(), std::move(r));
}

std::vector<StateVector> trajectory_evolve(const StateVector& state, const SparseOperator& h,
                                           const NoiseModel& model, double t_seconds, double dt,
                                           int n_traj, std::uint64_t seed, int threads) {
    if (!h.hermitian()) throw_invalid("trajectory_evolve: Hamiltonian must be Hermitian");
    if (!same_basis(*state.basis(), *h.basis()))
        throw_mismatch("trajectory_evolve: basis mismatch");
    model.validate(state.basis()->n_sites());
    if (n_traj < 1) throw_invalid("trajectory_evolve: need at least one trajectory");
    if (!(dt > 0.0)) throw_invalid("trajectory_evolve: dt must be > 0");

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_seconds / dt));
    const double step = n_steps > 0 ? t_seconds / static_cast<double>(n_steps) : 0.0;

    // Effective propagator exp(-i (H - i/2 sum L^dag L) dt); L^dag L terms are
    // diagonal (n_j and 2 gamma_phi n_j^2), so H_eff is H with a complex shift.
    const LindbladTerms terms = build_terms(*state.basis(), model);
    Eigen::MatrixXcd heff = Eigen::MatrixXcd(h.matrix());
    for (Eigen::Index k = 0; k < heff.rows(); ++k)
        heff(k, k) -= Complex(0.0, 1.0) * terms.heff_diag(k);
    const Eigen::MatrixXcd u_eff = (Complex(0.0, -1.0) * step * heff).exp();

    // Jump channels: sqrt(gamma1) a_j and sqrt(2 gamma_phi) n_j.
    struct Channel {
        SparseMatrix op;
    };
    std::vector<Channel> channels;
    for (int s = 1; s <= state.basis()->n_sites(); ++s) {
        const double g1 = model.gamma1(s);
        if (g1 > 0.0)
            channels.push_back({SparseMatrix(std::sqrt(g1) * lowering_operator(state.basis(), s).matrix())});
        const double gphi = model.gamma_phi(s);
        if (gphi > 0.0)
            channels.push_back(
                {SparseMatrix(std::sqrt(2.0 * gphi) * number_operator(state.basis(), s).matrix())});
    }

    std::vector<StateVector> ensemble(static_cast<std::size_t>(n_traj), StateVector(state.basis()));
    const auto run_range = [&](int begin, int end) {
        std::vector<double> weights(channels.size());
        for (int traj = begin; traj < end; ++traj) {
            std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(traj)));
            Vector psi = state.amplitudes();
            for (std::size_t s = 0; s < n_steps; ++s) {
                Vector cand = u_eff * psi;
                const double p_nojump = cand.squaredNorm() / psi.squaredNorm();
                const double p_jump = std::max(0.0, 1.0 - p_nojump);
                if (p_jump > 0.1)
                    throw_numeric("trajectory_evolve: jump probability per step above 0.1 (dt too "
                                  "large)");
                if (uniform01(rng) < p_jump) {
                    double total = 0.0;
                    for (std::size_t c = 0; c < channels.size(); ++c) {
                        const Vector lp = channels[c].op * psi;
                        weights[c] = lp.squaredNorm();
                        total += weights[c];
                    }
                    if (total <= 0.0) throw_numeric("trajectory_evolve: jump with no open channel");
                    const std::vector<double> cum = cumulative_sum(weights);
                    const std::size_t c = sample_index(cum, total, rng);
                    psi = channels[c].op * psi;
                } else {
                    psi = std::move(cand);
                }
                psi.normalize();
            }
            ensemble[static_cast<std::size_t>(traj)] = StateVector(state.basis(), psi);
        }
    };

    const int n_workers = std::clamp(threads, 1, n_traj);
    if (n_workers == 1) {
        run_range(0, n_traj);
    } else {
        std::vector<std::future<void>> futures;
        const int chunk = (n_traj + n_workers - 1) / n_workers;
        for (int w = 0; w < n_workers; ++w) {
            const int begin = w * chunk;
            const int end = std::min(n_traj, begin + chunk);
            if (begin >= end) break;
            futures.push_back(std::async(std::launch::async, run_range, begin, end));
        }
        for (auto& f : futures) f.get();
    }
    return ensemble;
}

double ensemble_expectation(const SparseOperator& op, std::span<const StateVector> ensemble) {
    if (ensemble.empty()) throw_invalid("ensemble_expectation: empty ensemble");
    double sum = 0.0;
    for (const auto& psi : ensemble) sum += real_expectation(op, psi);
    return sum / static_cast<double>(ensemble.size());
}

StateVector embed_multi_sector(const StateVector& state,
                               const std::shared_ptr<const MultiSectorBasis>& multi) {
    StateVector out((BasisPtr(multi)));
    const auto& from = *state.basis();
    for (std::size_t k = 0; k < from.dim(); ++k) {
        const Complex a = state.amplitudes()(static_cast<Eigen::Index>(k));
        if (a == Complex(0.0)) continue;
        auto idx = multi->find(from.state(k));
        if (!idx)
            throw_mismatch("embed_multi_sector: state does not fit into the multi-sector basis");
        out.amplitudes()(static_cast<Eigen::Index>(*idx)) = a;
    }
    return out;
}

DensityMatrix staggered_gauge_density(const DensityMatrix& rho) {
    const auto& basis = *rho.basis();
    Eigen::VectorXd signs(static_cast<Eigen::Index>(basis.dim()));
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        auto occ = basis.state(k);
        int parity = 0;
        for (std::size_t s = 1; s < occ.size(); s += 2) parity += occ[s];
        signs(static_cast<Eigen::Index>(k)) = (parity & 1) ? -1.0 : 1.0;
    }
    Eigen::MatrixXcd mapped =
        signs.asDiagonal() * rho.matrix() * signs.asDiagonal();
    return DensityMatrix(rho.basis(), std::move(mapped));
}

}  // namespace fluxladder
