#include "fluxladder/engine.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "fluxladder/errors.hpp"

namespace fluxladder {

namespace {

using MatVec = std::function<Vector(const Vector&)>;

struct DenseEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
};

// Full dense Hermitian eigendecomposition; real-symmetric operators take the
// real solver path so eigenvectors of time-reversal-symmetric Hamiltonians
// come out real.
DenseEigen dense_eigh(const SparseOperator& op) {
    if (!op.hermitian()) throw_invalid("eigensolver: operator must be Hermitian");
    DenseEigen out;
    if (op.is_real()) {
        Eigen::MatrixXd h = op.dense().real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success) throw_numeric("dense eigensolver failed");
        out.values = es.eigenvalues();
        out.vectors = es.eigenvectors().cast<Complex>();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.dense());
        if (es.info() != Eigen::Success) throw_numeric("dense eigensolver failed");
        out.values = es.eigenvalues();
        out.vectors = es.eigenvectors();
    }
    return out;
}

double operator_scale(const Eigen::VectorXd& values) {
    double s = 0.0;
    if (values.size() > 0) s = std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
    return std::max(s, 1e-300);
}

void check_residual(const SparseOperator& op, const StateVector& psi, double energy, double scale) {
    const Vector r = op.matrix() * psi.amplitudes() - energy * psi.amplitudes();
    if (r.norm() > 1e-10 * std::max(scale, 1.0))
        throw_numeric("eigensolver: residual exceeds 1e-10 * ||H||");
}

// Lanczos with full reorthogonalization; returns the two lowest Ritz pairs.
struct LanczosResult {
    double e0 = 0.0, e1 = 0.0;
    Vector v0, v1;
    double scale = 0.0;
};

LanczosResult lanczos_lowest(const SparseOperator& op, int max_iter, double tol) {
    double last_resid = -1.0;
    const auto n = static_cast<Eigen::Index>(op.dim());
    // Deterministic start vector; components decorrelated from any basis state.
    Vector q(n);
    std::uint64_t s = 0x2545f4914f6cdd1dull;
    for (Eigen::Index i = 0; i < n; ++i) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        q(i) = Complex(static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5,
                       static_cast<double>((s * 0x9e3779b97f4a7c15ull) >> 11) * 0x1.0p-53 - 0.5);
    }
    q.normalize();

    const int m_max = std::min<int>(max_iter, static_cast<int>(n));
    Eigen::MatrixXcd v(n, m_max);
    std::vector<double> alpha, beta;
    v.col(0) = q;
    int m = 0;
    double scale = 1.0;
    for (int j = 0; j < m_max; ++j) {
        Vector w = op.matrix() * v.col(j);
        const double a = std::real(v.col(j).dot(w));
        alpha.push_back(a);
        w -= a * v.col(j);
        if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * v.col(j - 1);
        // full reorthogonalization, twice for safety
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i <= j; ++i) w -= v.col(i).dot(w) * v.col(i);
        const double b = w.norm();
        m = j + 1;

        // Ritz values of the current tridiagonal block every few steps.
        if (b < 1e-13 || j == m_max - 1 || (j >= 10 && j % 5 == 0)) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
            for (int i = 0; i + 1 < m; ++i)
                t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            scale = operator_scale(es.eigenvalues());
            const double resid = b * std::abs(es.eigenvectors()(m - 1, 0));
            last_resid = resid;
            // m == n means the Krylov space exhausted the full space: exact.
            if (b < 1e-13 || resid < tol * scale || m == static_cast<int>(n)) {
                LanczosResult out;
                out.e0 = es.eigenvalues()(0);
                out.v0 = v.leftCols(m) * es.eigenvectors().col(0).cast<Complex>();
                out.v0.normalize();
                if (m > 1) {
                    out.e1 = es.eigenvalues()(1);
                    out.v1 = v.leftCols(m) * es.eigenvectors().col(1).cast<Complex>();
                    out.v1.normalize();
                } else {
                    out.e1 = out.e0;
                }
                out.scale = scale;
                return out;
            }
        }
        if (j + 1 < m_max) {
            beta.push_back(b);
            v.col(j + 1) = w / b;
        }
    }
    std::ostringstream msg;
    msg << "lanczos: no convergence after " << m_max << " iterations (residual " << last_resid
        << ", tolerance " << tol * scale << ")";
    throw_numeric(msg.str());
}

// exp(-i H dt) v through one Lanczos subspace; err_out estimates the local
// truncation error so callers can subdivide.  The subspace stops growing as
// soon as its own estimate drops below early_tol.
Vector lanczos_exp_step(const MatVec& mv, const Vector& v, double dt, int m_max, double* err_out,
                        double early_tol) {
    const double norm0 = v.norm();
    if (norm0 == 0.0) {
        *err_out = 0.0;
        return v;
    }
    const auto n = v.size();
    const int m_cap = std::min<int>(m_max, static_cast<int>(n));
    Eigen::MatrixXcd basis(n, m_cap);
    basis.col(0) = v / norm0;
    std::vector<double> alpha, beta;
    bool breakdown = false;
    double last_beta = 0.0;
    int m = 0;

    // exp(-i T dt) e_1 on the current tridiagonal block
    Eigen::VectorXcd u;
    const auto small_exp = [&]() {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
        for (int i = 0; i + 1 < m; ++i)
            t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        Eigen::VectorXcd phases(m);
        for (int i = 0; i < m; ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i) * dt);
        const Eigen::VectorXd e1 = es.eigenvectors().row(0).transpose();
        u = es.eigenvectors().cast<Complex>() * phases.cwiseProduct(e1.cast<Complex>());
    };
    // a-posteriori estimate: the weight leaking past the last basis vector
    // over this step (beta carries 1/time, so the dt factor makes it a norm
    // error of the unit-norm result)
    const auto estimate = [&]() { return last_beta * std::abs(u(m - 1)) * std::abs(dt); };

    double err = 0.0;
    for (int j = 0; j < m_cap; ++j) {
        Vector w = mv(basis.col(j));
        const double a = std::real(basis.col(j).dot(w));
        alpha.push_back(a);
        w -= a * basis.col(j);
        if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * basis.col(j - 1);
        for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
        const double b = w.norm();
        last_beta = b;
        m = j + 1;
        if (b < 1e-14) {
            breakdown = true;  // invariant subspace: the small expm is exact
            break;
        }
        if (m >= 3 || m == m_cap) {
            small_exp();
            err = estimate();
            if (err < early_tol) break;
        }
        if (j + 1 < m_cap) {
            beta.push_back(b);
            basis.col(j + 1) = w / b;
        }
    }
    if (u.size() != m) small_exp();
    *err_out = (breakdown || m >= static_cast<int>(n)) ? 0.0 : estimate();
    return norm0 * (basis.leftCols(m) * u);
}

}  // namespace

EigenPair ground_state(const SparseOperator& op, const EigenOptions& opts) {
    if (!op.hermitian()) throw_invalid("ground_state: operator must be Hermitian");
    if (op.dim() == 0) throw_invalid("ground_state: empty operator");

    double e0 = 0.0, e1 = 0.0, scale = 0.0;
    Vector v0, v1;
    if (op.dim() <= opts.dense_cutoff) {
        DenseEigen es = dense_eigh(op);
        e0 = es.values(0);
        v0 = es.vectors.col(0);
        if (es.values.size() > 1) {
            e1 = es.values(1);
            v1 = es.vectors.col(1);
        } else {
            e1 = e0;
        }
        scale = operator_scale(es.values);
    } else {
        LanczosResult lr = lanczos_lowest(op, opts.lanczos_max_iter, opts.lanczos_tol);
        e0 = lr.e0;
        e1 = lr.e1;
        v0 = lr.v0;
        v1 = lr.v1;
        scale = lr.scale;
    }

    EigenPair out;
    out.energy = e0;
    out.state = StateVector(op.basis(), std::move(v0));
    check_residual(op, out.state, e0, scale);
    if (op.dim() > 1 && (e1 - e0) < opts.degeneracy_tol * scale) {
        out.degenerate = true;
        out.partner_energy = e1;
        out.partner_state = StateVector(op.basis(), std::move(v1));
    }
    return out;
}

EigenPair top_state(const LatticeSpec& spec, BasisPtr basis, const EigenOptions& opts) {
    EigenPair low = ground_state(assemble(negate_map(spec), basis), opts);
    EigenPair out;
    out.energy = -low.energy;
    // Eigenvectors of H(negated spec) map onto eigenvectors of -H(spec)
    // through the staggered gauge.
    out.state = staggered_gauge_state(low.state);
    out.degenerate = low.degenerate;
    if (low.partner_energy) out.partner_energy = -*low.partner_energy;
    if (low.partner_state) out.partner_state = staggered_gauge_state(*low.partner_state);
    return out;
}

std::pair<StateVector, StateVector> chiral_combinations(const EigenPair& pair) {
    if (!pair.degenerate || !pair.partner_state)
        throw_invalid("chiral_combinations: eigenpair is not a flagged degenerate doublet");
    const Vector& a = pair.state.amplitudes();
    const Vector& b = pair.partner_state->amplitudes();
    Vector plus = M_SQRT1_2 * (a + Complex(0.0, 1.0) * b);
    Vector minus = M_SQRT1_2 * (a - Complex(0.0, 1.0) * b);
    return {StateVector(pair.state.basis(), std::move(plus)),
            StateVector(pair.state.basis(), std::move(minus))};
}

std::vector<double> spectrum(const SparseOperator& op) {
    if (op.dim() > 4096) throw_invalid("spectrum: dense path only (dim too large)");
    DenseEigen es = dense_eigh(op);
    return {es.values.data(), es.values.data() + es.values.size()};
}

StateVector evolve(const StateVector& state, const SparseOperator& h, double t_seconds,
                   const EvolveOptions& opts) {
    if (!h.hermitian()) throw_invalid("evolve: Hamiltonian must be Hermitian");
    if (!same_basis(*state.basis(), *h.basis())) throw_mismatch("evolve: basis mismatch");
    if (t_seconds == 0.0) return state;

    if (h.dim() <= opts.dense_cutoff) {
        DenseEigen es = dense_eigh(h);
        Eigen::VectorXcd phases(es.values.size());
        for (Eigen::Index i = 0; i < es.values.size(); ++i)
            phases(i) = std::polar(1.0, -es.values(i) * t_seconds);
        Vector y = es.vectors * phases.cwiseProduct(es.vectors.adjoint() * state.amplitudes());
        return StateVector(state.basis(), std::move(y));
    }
    const auto& mat = h.matrix();
    return evolve_krylov(state, [&mat](const Vector& x) { return Vector(mat * x); }, t_seconds,
                         opts.krylov_dim, opts.krylov_tol);
}

StateVector evolve_krylov(const StateVector& state, const MatVec& matvec, double t_seconds,
                          int krylov_dim, double tol) {
    Vector v = state.amplitudes();
    const double t_total = std::abs(t_seconds);
    if (t_total == 0.0) return state;
    const double sign = t_seconds < 0.0 ? -1.0 : 1.0;
    double done = 0.0;
    double dt = t_total;
    const double norm_ref = std::max(v.norm(), 1e-300);
    while (done < t_total) {
        dt = std::min(dt, t_total - done);
        if (dt < t_total * 1e-14)
            throw_numeric("evolve: step-size underflow (Krylov step not converging)");
        double err = 0.0;
        Vector y = lanczos_exp_step(matvec, v, sign * dt, krylov_dim, &err,
                                    0.05 * tol * norm_ref);
        if (err > tol * norm_ref) {
            dt *= 0.5;
            continue;
        }
        v = std::move(y);
        done += dt;
        if (err < 0.1 * tol * norm_ref) dt *= 1.5;
    }
    return StateVector(state.basis(), std::move(v));
}

double ramp_shape_value(RampSegment::Shape shape, double start, double end, double frac) {
    switch (shape) {
        case RampSegment::Shape::step:
            return end;
        case RampSegment::Shape::linear:
            return start + (end - start) * frac;
        case RampSegment::Shape::cosine:
            return start + (end - start) * 0.5 * (1.0 - std::cos(M_PI * frac));
    }
    return end;
}

RampResult evolve_ramp(const RampSchedule& schedule, const LatticeSpec& spec, BasisPtr basis,
                       const StateVector* target) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_sites);
    if (schedule.initial_occupations.size() != n)
        throw_invalid("evolve_ramp: initial occupations must cover all sites");
    if (!(schedule.dt > 0.0)) throw_invalid("evolve_ramp: dt must be > 0");
    for (const auto& seg : schedule.segments) {
        if (!(seg.duration_s > 0.0)) throw_invalid("evolve_ramp: segment durations must be > 0");
        if (schedule.dt > seg.duration_s)
            throw_invalid("evolve_ramp: dt exceeds the shortest segment duration");
        if (seg.detuning_start.size() != n || seg.detuning_end.size() != n)
            throw_invalid("evolve_ramp: detuning arrays must have n_sites entries");
        for (double d : seg.detuning_start)
            if (!std::isfinite(d)) throw_invalid("evolve_ramp: detunings must be finite");
        for (double d : seg.detuning_end)
            if (!std::isfinite(d)) throw_invalid("evolve_ramp: detunings must be finite");
    }

    // Static part: hoppings plus the time-independent diagonal (omega, u).
    const SparseOperator h_static = assemble(spec, basis);
    const std::size_t dim = basis->dim();

    // Occupation table for the time-dependent diagonal.
    Eigen::MatrixXd numbers(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < dim; ++k) {
        auto occ = basis->state(k);
        for (std::size_t s = 0; s < n; ++s)
            numbers(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)) = occ[s];
    }

    StateVector psi = product_state(basis, schedule.initial_occupations);

    Eigen::VectorXd detuning(static_cast<Eigen::Index>(n));
    Eigen::VectorXd diag(static_cast<Eigen::Index>(dim));
    const auto& h_mat = h_static.matrix();
    for (const auto& seg : schedule.segments) {
        const auto n_steps = static_cast<std::size_t>(std::ceil(seg.duration_s / schedule.dt));
        const double dt = seg.duration_s / static_cast<double>(n_steps);
        for (std::size_t step = 0; step < n_steps; ++step) {
            // midpoint rule: H is frozen at the segment-local half step
            const double frac =
                (static_cast<double>(step) + 0.5) / static_cast<double>(n_steps);
            for (std::size_t s = 0; s < n; ++s)
                detuning(static_cast<Eigen::Index>(s)) =
                    ramp_shape_value(seg.shape, seg.detuning_start[s], seg.detuning_end[s], frac);
            diag = numbers * detuning;
            auto matvec = [&](const Vector& x) -> Vector {
                return h_mat * x + diag.cast<Complex>().cwiseProduct(x);
            };
            psi = evolve_krylov(psi, matvec, dt);
        }
    }

    RampResult out;
    out.state = std::move(psi);
    if (target) {
        if (!same_basis(*out.state.basis(), *target->basis()))
            throw_mismatch("evolve_ramp: target basis mismatch");
        out.fidelity = std::norm(inner(*target, out.state));
    }
    return out;
}

}  // namespace fluxladder
