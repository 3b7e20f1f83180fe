#include "oracle/dense_reference.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace oracle {

Params uniform_params(int n_sites, double j, double leg_ratio, int n_max) {
    Params p;
    p.n_sites = n_sites;
    p.omega.assign(n_sites, 0.0);
    p.u.assign(n_sites, 0.0);
    p.j_rung.assign(n_sites - 1, j);
    p.j_leg.assign(n_sites - 2, std::abs(leg_ratio) * j);
    // plaquette flux pi (negative ratio) or 0; the stored leg phase differs
    // from it by pi because the two rung terms carry sign -1 each
    p.flux = leg_ratio < 0.0 ? 0.0 : M_PI;
    p.n_max = n_max;
    return p;
}

namespace {

void enumerate_ascending(int sites_left, int total_left, int n_max, std::vector<int>& prefix,
                         std::vector<std::vector<int>>& out) {
    if (sites_left == 1) {
        if (total_left <= n_max) {
            prefix.push_back(total_left);
            out.push_back(prefix);
            prefix.pop_back();
        }
        return;
    }
    for (int n = 0; n <= std::min(n_max, total_left); ++n) {
        prefix.push_back(n);
        enumerate_ascending(sites_left - 1, total_left - n, n_max, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<std::vector<int>> enumerate_states(int n_sites, int total, int n_max) {
    std::vector<std::vector<int>> out;
    std::vector<int> prefix;
    enumerate_ascending(n_sites, total, n_max, prefix, out);
    return out;
}

std::uint64_t count_states(int n_sites, int total, int n_max) {
    if (total < 0) return 0;
    if (n_sites == 0) return total == 0 ? 1 : 0;
    std::uint64_t sum = 0;
    for (int n = 0; n <= std::min(n_max, total); ++n)
        sum += count_states(n_sites - 1, total - n, n_max);
    return sum;
}

Model::Model(Params p, int total) : params(std::move(p)) {
    states = enumerate_states(params.n_sites, total, params.n_max);
}

int Model::find(const std::vector<int>& occ) const {
    for (int k = 0; k < dim(); ++k)
        if (states[static_cast<std::size_t>(k)] == occ) return k;
    return -1;
}

Matrix Model::hop_matrix(int i, int j) const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (int k = 0; k < dim(); ++k) {
        std::vector<int> occ = states[static_cast<std::size_t>(k)];
        if (occ[static_cast<std::size_t>(j - 1)] == 0) continue;
        if (occ[static_cast<std::size_t>(i - 1)] + 1 > params.n_max) continue;
        const double amp = std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(j - 1)]) *
                                     (occ[static_cast<std::size_t>(i - 1)] + 1.0));
        occ[static_cast<std::size_t>(j - 1)] -= 1;
        occ[static_cast<std::size_t>(i - 1)] += 1;
        const int k2 = find(occ);
        if (k2 >= 0) m(k2, k) += amp;
    }
    return m;
}

Matrix Model::number_matrix(int site) const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (int k = 0; k < dim(); ++k)
        m(k, k) = static_cast<double>(states[static_cast<std::size_t>(k)][static_cast<std::size_t>(site - 1)]);
    return m;
}

Matrix Model::hamiltonian() const {
    Matrix h = Matrix::Zero(dim(), dim());
    for (int s = 1; s <= params.n_sites; ++s) {
        const Matrix n = number_matrix(s);
        h += params.omega[static_cast<std::size_t>(s - 1)] * n +
             0.5 * params.u[static_cast<std::size_t>(s - 1)] * (n * n - n);
    }
    for (int r = 1; r <= params.n_sites - 1; ++r) {
        const Matrix hop = hop_matrix(r, r + 1);
        h -= params.j_rung[static_cast<std::size_t>(r - 1)] * (hop + hop.adjoint());
    }
    const Complex phase = std::polar(1.0, params.flux);
    for (int l = 1; l <= params.n_sites - 2; ++l) {
        const Matrix hop = hop_matrix(l, l + 2);
        h += params.j_leg[static_cast<std::size_t>(l - 1)] *
             (phase * hop + std::conj(phase) * hop.adjoint());
    }
    return h;
}

Matrix Model::current_matrix(int rung) const {
    const Matrix hop = hop_matrix(rung, rung + 1);
    return Complex(0.0, 1.0) * params.j_rung[static_cast<std::size_t>(rung - 1)] *
           (hop - hop.adjoint());
}

Matrix Model::bond_matrix(int rung) const {
    const Matrix hop = hop_matrix(rung, rung + 1);
    return hop + hop.adjoint();
}

EigenSystem eig(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("oracle eig failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Observables observables(const Model& model, const Vector& state) {
    Observables out;
    const int n = model.params.n_sites;
    const int n_rungs = n - 1;
    out.one_body = Matrix::Zero(n, n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            const Matrix m =
                i == j ? model.number_matrix(i) : model.hop_matrix(i, j);
            out.one_body(i - 1, j - 1) = state.dot(m * state);
        }
    out.currents.resize(static_cast<std::size_t>(n_rungs));
    std::vector<Matrix> jops;
    jops.reserve(static_cast<std::size_t>(n_rungs));
    for (int r = 1; r <= n_rungs; ++r) {
        jops.push_back(model.current_matrix(r));
        out.currents[static_cast<std::size_t>(r - 1)] = state.dot(jops.back() * state).real();
    }
    out.g = Eigen::MatrixXd::Zero(n_rungs, n_rungs);
    for (int i = 1; i <= n_rungs; ++i)
        for (int j = 1; j <= n_rungs; ++j) {
            if (std::abs(i - j) == 1) continue;
            const Complex jj = state.dot(jops[static_cast<std::size_t>(i - 1)] *
                                         (jops[static_cast<std::size_t>(j - 1)] * state));
            out.g(i - 1, j - 1) = jj.real() - out.currents[static_cast<std::size_t>(i - 1)] *
                                                  out.currents[static_cast<std::size_t>(j - 1)];
        }
    out.chiral = 0.0;
    for (int d = 2; d <= n_rungs - 1; ++d) {
        double sum = 0.0;
        for (int j = 1; j + d <= n_rungs; ++j) sum += out.g(j - 1, j + d - 1);
        out.chiral += sum / static_cast<double>(n_rungs - d);
    }
    out.bond.resize(static_cast<std::size_t>(n_rungs));
    out.bond_order = 0.0;
    for (int r = 1; r <= n_rungs; ++r) {
        out.bond[static_cast<std::size_t>(r - 1)] =
            state.dot(model.bond_matrix(r) * state).real();
        out.bond_order += (r % 2 == 0 ? 1.0 : -1.0) * out.bond[static_cast<std::size_t>(r - 1)];
    }
    return out;
}

Vector integrate_schroedinger(const Model& model,
                              const std::function<std::vector<double>(double)>& detuning_of_t,
                              const Vector& psi0, double t_total, double dt) {
    const Matrix h_static = model.hamiltonian();
    const int n = model.params.n_sites;
    std::vector<Eigen::VectorXd> nvecs;
    for (int s = 1; s <= n; ++s) nvecs.push_back(model.number_matrix(s).diagonal().real());

    const auto rhs = [&](double t, const Vector& psi) -> Vector {
        Vector h_psi = h_static * psi;
        const std::vector<double> det = detuning_of_t(t);
        for (int s = 0; s < n; ++s)
            h_psi += det[static_cast<std::size_t>(s)] *
                     nvecs[static_cast<std::size_t>(s)].cast<Complex>().cwiseProduct(psi);
        return Complex(0.0, -1.0) * h_psi;
    };

    Vector psi = psi0;
    const auto n_steps = static_cast<std::size_t>(std::llround(t_total / dt));
    const double h = t_total / static_cast<double>(n_steps);
    double t = 0.0;
    for (std::size_t s = 0; s < n_steps; ++s) {
        const Vector k1 = rhs(t, psi);
        const Vector k2 = rhs(t + 0.5 * h, psi + 0.5 * h * k1);
        const Vector k3 = rhs(t + 0.5 * h, psi + 0.5 * h * k2);
        const Vector k4 = rhs(t + h, psi + h * k3);
        psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    return psi;
}

MultiModel::MultiModel(Params p, int max_total) : params(std::move(p)) {
    for (int total = 0; total <= max_total; ++total) {
        auto sector = enumerate_states(params.n_sites, total, params.n_max);
        states.insert(states.end(), sector.begin(), sector.end());
    }
}

int MultiModel::find(const std::vector<int>& occ) const {
    for (int k = 0; k < dim(); ++k)
        if (states[static_cast<std::size_t>(k)] == occ) return k;
    return -1;
}

Matrix MultiModel::number_matrix(int site) const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (int k = 0; k < dim(); ++k)
        m(k, k) = static_cast<double>(states[static_cast<std::size_t>(k)][static_cast<std::size_t>(site - 1)]);
    return m;
}

Matrix MultiModel::lowering_matrix(int site) const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (int k = 0; k < dim(); ++k) {
        std::vector<int> occ = states[static_cast<std::size_t>(k)];
        const int ns = occ[static_cast<std::size_t>(site - 1)];
        if (ns == 0) continue;
        occ[static_cast<std::size_t>(site - 1)] -= 1;
        const int k2 = find(occ);
        if (k2 >= 0) m(k2, k) = std::sqrt(static_cast<double>(ns));
    }
    return m;
}

Matrix MultiModel::hamiltonian() const {
    // same couplings as Model::hamiltonian, over all sectors
    Matrix h = Matrix::Zero(dim(), dim());
    const auto hop = [&](int i, int j) {
        Matrix m = Matrix::Zero(dim(), dim());
        for (int k = 0; k < dim(); ++k) {
            std::vector<int> occ = states[static_cast<std::size_t>(k)];
            if (occ[static_cast<std::size_t>(j - 1)] == 0) continue;
            if (occ[static_cast<std::size_t>(i - 1)] + 1 > params.n_max) continue;
            const double amp =
                std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(j - 1)]) *
                          (occ[static_cast<std::size_t>(i - 1)] + 1.0));
            occ[static_cast<std::size_t>(j - 1)] -= 1;
            occ[static_cast<std::size_t>(i - 1)] += 1;
            const int k2 = find(occ);
            if (k2 >= 0) m(k2, k) += amp;
        }
        return m;
    };
    for (int s = 1; s <= params.n_sites; ++s) {
        const Matrix n = number_matrix(s);
        h += params.omega[static_cast<std::size_t>(s - 1)] * n +
             0.5 * params.u[static_cast<std::size_t>(s - 1)] * (n * n - n);
    }
    for (int r = 1; r <= params.n_sites - 1; ++r) {
        const Matrix m = hop(r, r + 1);
        h -= params.j_rung[static_cast<std::size_t>(r - 1)] * (m + m.adjoint());
    }
    const Complex phase = std::polar(1.0, params.flux);
    for (int l = 1; l <= params.n_sites - 2; ++l) {
        const Matrix m = hop(l, l + 2);
        h += params.j_leg[static_cast<std::size_t>(l - 1)] *
             (phase * m + std::conj(phase) * m.adjoint());
    }
    return h;
}

Matrix integrate_lindblad(const MultiModel& model, const std::vector<double>& t1,
                          const std::vector<double>& t2r, const Matrix& rho0, double t_total,
                          double dt) {
    const Matrix h = model.hamiltonian();
    struct Jump {
        Matrix l;
        Matrix ldl;  // L^dag L
    };
    std::vector<Jump> jumps;
    for (int s = 1; s <= model.params.n_sites; ++s) {
        const double g1 = 1.0 / t1[static_cast<std::size_t>(s - 1)];
        const double gphi =
            std::max(0.0, 1.0 / t2r[static_cast<std::size_t>(s - 1)] -
                              0.5 / t1[static_cast<std::size_t>(s - 1)]);
        if (g1 > 0.0) {
            Matrix l = std::sqrt(g1) * model.lowering_matrix(s);
            jumps.push_back({l, l.adjoint() * l});
        }
        if (gphi > 0.0) {
            Matrix l = std::sqrt(2.0 * gphi) * model.number_matrix(s);
            jumps.push_back({l, l.adjoint() * l});
        }
    }
    const auto rhs = [&](const Matrix& r) -> Matrix {
        Matrix d = Complex(0.0, -1.0) * (h * r - r * h);
        for (const auto& jump : jumps)
            d += jump.l * r * jump.l.adjoint() - 0.5 * (jump.ldl * r + r * jump.ldl);
        return d;
    };
    Matrix r = rho0;
    const auto n_steps = static_cast<std::size_t>(std::llround(t_total / dt));
    const double h_step = t_total / static_cast<double>(n_steps);
    for (std::size_t s = 0; s < n_steps; ++s) {
        const Matrix k1 = rhs(r);
        const Matrix k2 = rhs(r + 0.5 * h_step * k1);
        const Matrix k3 = rhs(r + 0.5 * h_step * k2);
        const Matrix k4 = rhs(r + h_step * k3);
        r += (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return r;
}

}  // namespace oracle
