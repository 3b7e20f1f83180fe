#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "fluxladder/errors.hpp"
#include "fluxladder/runner.hpp"
#include "fluxladder/util.hpp"

// The invariant battery behind the `verify` subcommand.  Each check is small
// and self-contained; together they cover the module-level invariants on
// systems small enough to re-verify at every run.

namespace fluxladder {

namespace {

using Check = std::function<std::string()>;  // returns "" on pass, detail on fail

std::string fail(const std::string& msg) { return msg; }

LatticeSpec random_spec(std::mt19937_64& rng, int n_sites, int n_max) {
    LatticeSpec spec;
    spec.n_sites = n_sites;
    spec.n_max = n_max;
    const auto n = static_cast<std::size_t>(n_sites);
    auto u01 = [&rng]() { return uniform01(rng); };
    spec.omega.resize(n);
    spec.u.resize(n);
    for (auto& v : spec.omega) v = 4.0 * u01() - 2.0;
    for (auto& v : spec.u) v = 4.0 * u01() - 2.0;
    spec.j_rung.assign(n - 1, 0.0);
    for (auto& v : spec.j_rung) v = 0.2 + u01();
    spec.j_leg.assign(n - 2, 0.0);
    for (auto& v : spec.j_leg) v = 0.2 + u01();
    spec.flux = 2.0 * M_PI * u01();
    return spec;
}

StateVector random_state(std::mt19937_64& rng, BasisPtr basis) {
    Vector amp(static_cast<Eigen::Index>(basis->dim()));
    for (Eigen::Index i = 0; i < amp.size(); ++i)
        amp(i) = Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
    StateVector psi(std::move(basis), std::move(amp));
    return psi.normalize();
}

std::string check_basis_counting() {
    for (int n_sites = 1; n_sites <= 8; ++n_sites)
        for (int total = 0; total <= 4; ++total)
            for (int n_max = 1; n_max <= 4; ++n_max) {
                if (total > n_sites * n_max) continue;
                auto basis = build_basis(n_sites, total, n_max);
                const std::size_t counted = FockBasis::count_states(n_sites, total, n_max);
                if (basis->dim() != counted)
                    return fail("enumeration and counting disagree at N=" +
                                std::to_string(n_sites));
            }
    if (build_basis(8, 4, 1)->dim() != 70) return fail("C(8,4) != 70");
    if (build_basis(8, 4, 4)->dim() != 330) return fail("weak compositions != 330");
    if (build_basis(8, 4, 2)->dim() != 266) return fail("cutoff-2 count != 266");
    return {};
}

std::string check_index_roundtrip() {
    for (auto [n, t, m] : {std::array<int, 3>{8, 4, 1}, {6, 3, 2}, {5, 4, 4}}) {
        auto basis = build_basis(n, t, m);
        for (std::size_t k = 0; k < basis->dim(); ++k) {
            auto idx = basis->find(basis->state(k));
            if (!idx || *idx != k) return fail("index(states[k]) != k");
        }
    }
    auto multi = build_multi_sector_basis(4, 3, 2);
    for (std::size_t k = 0; k < multi->dim(); ++k) {
        auto idx = multi->find(multi->state(k));
        if (!idx || *idx != k) return fail("multi-sector index(states[k]) != k");
    }
    return {};
}

std::string check_hop_adjoint() {
    auto basis = build_basis(3, 2, 2);
    const auto dim = basis->dim();
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            if (i == j) continue;
            for (std::size_t m = 0; m < dim; ++m)
                for (std::size_t n = 0; n < dim; ++n) {
                    StateVector em(basis), en(basis);
                    em.amplitudes()(static_cast<Eigen::Index>(m)) = 1.0;
                    en.amplitudes()(static_cast<Eigen::Index>(n)) = 1.0;
                    const Complex fwd = inner(em, apply_hop(en, i, j, 1.0));
                    const Complex bwd = inner(en, apply_hop(em, j, i, 1.0));
                    if (std::abs(fwd - std::conj(bwd)) > 1e-14)
                        return fail("<m|a_i^dag a_j|n> != conj(<n|a_j^dag a_i|m>)");
                }
        }
    return {};
}

std::string check_hamiltonian_structure() {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 4; ++rep) {
        const LatticeSpec spec = random_spec(rng, 5, 2);
        auto multi = build_multi_sector_basis(5, 4, 2);
        const SparseOperator h = assemble(spec, multi);
        const Eigen::MatrixXcd hd = h.dense();
        if ((hd - hd.adjoint()).cwiseAbs().maxCoeff() != 0.0)
            return fail("H not exactly Hermitian");
        Eigen::MatrixXcd nop = Eigen::MatrixXcd::Zero(hd.rows(), hd.cols());
        for (int s = 1; s <= 5; ++s) nop += number_operator(multi, s).dense();
        if ((hd * nop - nop * hd).cwiseAbs().maxCoeff() != 0.0)
            return fail("[H, N] != 0");
    }
    return {};
}

std::string check_sign_trick() {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 10; ++rep) {
        const int n_sites = 3 + static_cast<int>(rng() % 4);  // 3..6
        const int n_max = 1 + static_cast<int>(rng() % 2);
        const LatticeSpec spec = random_spec(rng, n_sites, n_max);
        const int total = std::min(n_sites * n_max, 1 + static_cast<int>(rng() % 3));
        auto basis = build_basis(n_sites, total, n_max);
        std::vector<double> sp = spectrum(assemble(spec, basis));
        std::vector<double> sn = spectrum(assemble(negate_map(spec), basis));
        std::sort(sp.begin(), sp.end());
        std::sort(sn.begin(), sn.end());
        for (std::size_t k = 0; k < sp.size(); ++k)
            if (std::abs(sn[k] + sp[sp.size() - 1 - k]) > 1e-10)
                return fail("spectrum(-H) != spectrum(H(phi+pi,-U,-omega))");
    }
    return {};
}

// Independent hard-core reference: the same couplings written as a spin-1/2
// XX model on bitstring states, built by bit manipulation instead of the
// occupation table.
std::string check_xx_equivalence() {
    std::mt19937_64 rng(13);
    const int n_sites = 6;
    LatticeSpec spec = random_spec(rng, n_sites, 1);
    spec.flux = M_PI;
    const std::size_t full = 1ull << n_sites;
    Eigen::MatrixXcd hxx = Eigen::MatrixXcd::Zero(full, full);
    const auto add_bit_hop = [&](int si, int sj, Complex amp) {
        for (std::size_t b = 0; b < full; ++b) {
            const bool occ_j = (b >> (sj - 1)) & 1ull;
            const bool occ_i = (b >> (si - 1)) & 1ull;
            if (!occ_j || occ_i) continue;
            const std::size_t b2 = (b & ~(1ull << (sj - 1))) | (1ull << (si - 1));
            hxx(static_cast<Eigen::Index>(b2), static_cast<Eigen::Index>(b)) += amp;
            hxx(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b2)) += std::conj(amp);
        }
    };
    for (std::size_t b = 0; b < full; ++b) {
        double diag = 0.0;
        for (int s = 1; s <= n_sites; ++s)
            if ((b >> (s - 1)) & 1ull) diag += spec.omega[static_cast<std::size_t>(s - 1)];
        hxx(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) = diag;
    }
    for (int s = 1; s <= n_sites - 1; ++s)
        add_bit_hop(s, s + 1, Complex(-spec.j_rung[static_cast<std::size_t>(s - 1)], 0.0));
    for (int s = 1; s <= n_sites - 2; ++s)
        add_bit_hop(s, s + 2,
                    spec.j_leg[static_cast<std::size_t>(s - 1)] * std::polar(1.0, spec.flux));

    auto basis = build_basis(n_sites, 3, 1);
    const Eigen::MatrixXcd hb = assemble(spec, basis).dense();
    std::vector<std::size_t> bits(basis->dim());
    for (std::size_t k = 0; k < basis->dim(); ++k) {
        auto occ = basis->state(k);
        std::size_t b = 0;
        for (int s = 0; s < n_sites; ++s)
            if (occ[static_cast<std::size_t>(s)]) b |= 1ull << s;
        bits[k] = b;
    }
    for (std::size_t k = 0; k < basis->dim(); ++k)
        for (std::size_t l = 0; l < basis->dim(); ++l)
            if (std::abs(hb(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) -
                         hxx(static_cast<Eigen::Index>(bits[k]),
                             static_cast<Eigen::Index>(bits[l]))) > 1e-12)
                return fail("hard-core H != spin-1/2 XX reference matrix");
    return {};
}

std::string check_gauge_covariance() {
    std::mt19937_64 rng(14);
    const LatticeSpec spec = random_spec(rng, 5, 2);
    auto basis = build_basis(5, 2, 2);
    const SparseOperator h = assemble(spec, basis);
    // conjugate by site-dependent phases e^{i theta_j n_j}
    std::vector<double> theta(5);
    for (auto& t : theta) t = 2.0 * M_PI * uniform01(rng);
    Eigen::VectorXcd phase(static_cast<Eigen::Index>(basis->dim()));
    for (std::size_t k = 0; k < basis->dim(); ++k) {
        auto occ = basis->state(k);
        double angle = 0.0;
        for (int s = 0; s < 5; ++s)
            angle += theta[static_cast<std::size_t>(s)] * occ[static_cast<std::size_t>(s)];
        phase(static_cast<Eigen::Index>(k)) = std::polar(1.0, angle);
    }
    const Eigen::MatrixXcd hd = h.dense();
    const Eigen::MatrixXcd hg =
        phase.conjugate().asDiagonal() * hd * phase.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e1(hd), e2(hg);
    if ((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() > 1e-10)
        return fail("site-phase gauge changed the spectrum");
    return {};
}

std::string check_sqrt_iswap() {
    auto basis = build_basis(2, 1, 1);
    const double j = 1.3e6;
    const SparseOperator h_bs =
        assemble_pair({PairHamiltonianSpec::Kind::beamsplitter, 1, -j}, basis);
    const double t_bs = calibrate_tbs(j);
    // U restricted to {|10>, |01>}
    const auto i10 = *basis->find(Occupation{1, 0});
    const auto i01 = *basis->find(Occupation{0, 1});
    Eigen::Matrix2cd u;
    for (int col = 0; col < 2; ++col) {
        StateVector e(basis);
        e.amplitudes()(static_cast<Eigen::Index>(col == 0 ? i10 : i01)) = 1.0;
        const StateVector out = evolve(e, h_bs, t_bs);
        u(0, col) = out.amplitudes()(static_cast<Eigen::Index>(i10));
        u(1, col) = out.amplitudes()(static_cast<Eigen::Index>(i01));
    }
    // u^2 must be the iSWAP block [[0, i], [i, 0]] up to a global phase
    const Eigen::Matrix2cd u2 = u * u;
    if (std::abs(u2(0, 0)) > 1e-10 || std::abs(u2(1, 1)) > 1e-10)
        return fail("beamsplitter squared has diagonal leakage");
    const Complex ph = u2(0, 1) / Complex(0.0, 1.0);
    if (std::abs(std::abs(ph) - 1.0) > 1e-10 || std::abs(u2(1, 0) / Complex(0.0, 1.0) - ph) > 1e-10)
        return fail("beamsplitter squared is not iSWAP up to a global phase");
    // and populations at t_bs from |10> are (1/2, 1/2)
    if (std::abs(std::norm(u(0, 0)) - 0.5) > 1e-10)
        return fail("beamsplitter time is not the quarter swap");
    return {};
}

std::string check_eigensolver() {
    std::mt19937_64 rng(15);
    const LatticeSpec spec = random_spec(rng, 6, 1);
    auto basis = build_basis(6, 3, 1);
    const SparseOperator h = assemble(spec, basis);
    const EigenPair gs = ground_state(h);
    const std::vector<double> all = spectrum(h);
    if (std::abs(gs.energy - all.front()) > 1e-9) return fail("ground energy != dense spectrum");
    // Lanczos path against the dense result
    EigenOptions opts;
    opts.dense_cutoff = 1;
    const EigenPair lz = ground_state(h, opts);
    if (std::abs(lz.energy - gs.energy) > 1e-9) return fail("Lanczos and dense energies differ");
    if (std::abs(std::abs(inner(lz.state, gs.state)) - 1.0) > 1e-7)
        return fail("Lanczos and dense ground vectors differ");
    return {};
}

std::string check_evolve_unitarity() {
    std::mt19937_64 rng(16);
    const LatticeSpec spec = random_spec(rng, 5, 2);
    auto basis = build_basis(5, 2, 2);
    const SparseOperator h = assemble(spec, basis);
    StateVector psi = random_state(rng, basis);
    const double e0 = real_expectation(h, psi);
    const StateVector one = evolve(psi, h, 3.7);
    const StateVector two = evolve(evolve(psi, h, 1.3), h, 2.4);
    if ((one.amplitudes() - two.amplitudes()).norm() > 1e-9)
        return fail("evolve(t1+t2) != evolve(t2) o evolve(t1)");
    if (std::abs(one.norm() - 1.0) > 1e-10) return fail("evolve norm drift");
    if (std::abs(real_expectation(h, one) - e0) > 1e-9 * (1.0 + h.max_abs()))
        return fail("energy not conserved");
    // Krylov path: many small steps
    EvolveOptions kr;
    kr.dense_cutoff = 1;
    StateVector walk = psi;
    for (int s = 0; s < 1000; ++s) walk = evolve(walk, h, 0.01, kr);
    if (std::abs(walk.norm() - 1.0) > 1e-10) return fail("Krylov norm drift over 1e3 steps");
    const StateVector direct = evolve(psi, h, 10.0);
    if ((walk.amplitudes() - direct.amplitudes()).norm() > 1e-7)
        return fail("Krylov stepping disagrees with dense propagator");

    // number conservation on a multi-sector basis: no weight may leak out of
    // the starting sector
    auto multi = build_multi_sector_basis(4, 3, 2);
    const SparseOperator hm = assemble(random_spec(rng, 4, 2), multi);
    StateVector sector((BasisPtr(multi)));
    sector.amplitudes()(static_cast<Eigen::Index>(*multi->find(Occupation{1, 1, 0, 0}))) = 1.0;
    for (auto cutoff : {std::size_t{1}, std::size_t{4096}}) {
        EvolveOptions opt;
        opt.dense_cutoff = cutoff;
        const StateVector out = evolve(sector, hm, 2.3, opt);
        double leak = 0.0;
        for (std::size_t k = 0; k < multi->sector_offset(2); ++k) leak += out.probability(k);
        for (std::size_t k = multi->sector_offset(3); k < multi->dim(); ++k)
            leak += out.probability(k);
        if (leak > 1e-20) return fail("evolve leaked weight between number sectors");
    }
    return {};
}

std::string check_degeneracy_flag() {
    auto basis = build_basis(3, 1, 1);
    std::vector<Triplet> trips{{0, 0, Complex(1.0, 0.0)},
                               {1, 1, Complex(1.0, 0.0)},
                               {2, 2, Complex(2.0, 0.0)}};
    const EigenPair deg = ground_state(SparseOperator(basis, trips, true));
    if (!deg.degenerate || !deg.partner_state) return fail("exact degeneracy not flagged");
    std::vector<Triplet> trips2{{0, 0, Complex(1.0, 0.0)},
                                {1, 1, Complex(1.5, 0.0)},
                                {2, 2, Complex(2.0, 0.0)}};
    if (ground_state(SparseOperator(basis, trips2, true)).degenerate)
        return fail("gapped operator flagged as degenerate");
    return {};
}

std::string check_one_body() {
    std::mt19937_64 rng(17);
    auto basis = build_basis(5, 3, 2);
    const StateVector psi = random_state(rng, basis);
    const Eigen::MatrixXcd ob = one_body_matrix(psi);
    if ((ob - ob.adjoint()).cwiseAbs().maxCoeff() > 1e-12) return fail("one-body not Hermitian");
    if (std::abs(ob.trace().real() - 3.0) > 1e-12) return fail("one-body trace != total number");
    return {};
}

std::string check_ground_currents() {
    const LatticeSpec spec = uniform_spec(6, 1.0, -1.22, 1);
    auto basis = build_basis(6, 3, 1);
    const EigenPair gs = ground_state(assemble(spec, basis));
    for (int j = 1; j <= 5; ++j)
        if (std::abs(rung_current(gs.state, j, spec)) > 1e-10)
            return fail("rung current does not vanish on the real ground state");
    return {};
}

std::string check_g_symmetry() {
    const LatticeSpec spec = uniform_spec(6, 1.0, -1.5, 1);
    auto basis = build_basis(6, 3, 1);
    const EigenPair gs = ground_state(assemble(spec, basis));
    const int n_rungs = 5;
    for (auto [i, j] : measurable_rung_pairs(6)) {
        const double gij = current_correlation(gs.state, i, j, spec);
        const double gji = current_correlation(gs.state, j, i, spec);
        if (std::abs(gij - gji) > 1e-12) return fail("G(i,j) != G(j,i)");
        const double mirrored =
            current_correlation(gs.state, n_rungs + 1 - j, n_rungs + 1 - i, spec);
        if (std::abs(gij - mirrored) > 1e-10) return fail("G not reflection symmetric");
    }
    return {};
}

std::string check_hardcore_estimators() {
    const LatticeSpec spec = uniform_spec(6, 1.0, -1.22, 1);
    auto basis = build_basis(6, 3, 1);
    const EigenPair gs = ground_state(assemble(spec, basis));
    for (int p = 1; p <= 5; ++p) {
        MeasurementPlan plan;
        plan.kind = MeasurementPlan::Kind::current;
        plan.pairs = {p};
        const StateVector post = apply_protocol(gs.state, plan, spec);
        const double est = estimate_current_exact(post, p, spec.j_rung[static_cast<std::size_t>(p - 1)]);
        if (std::abs(est - rung_current(gs.state, p, spec)) > 1e-10)
            return fail("hard-core current estimator not exact");
    }
    MeasurementPlan corr;
    corr.kind = MeasurementPlan::Kind::current_correlation;
    corr.pairs = {1, 4};
    const StateVector post = apply_protocol(gs.state, corr, spec);
    const double est = estimate_current_correlation_exact(post, 1, 4, spec.j_rung[0],
                                                          spec.j_rung[3]);
    if (std::abs(est - current_correlation(gs.state, 1, 4, spec)) > 1e-10)
        return fail("hard-core correlation estimator not exact");
    MeasurementPlan bond;
    bond.kind = MeasurementPlan::Kind::bond_kinetic;
    bond.pairs = {2};
    bond.delta = 8.0;
    const StateVector post_b = apply_protocol(gs.state, bond, spec);
    const double est_b =
        estimate_bond_kinetic_exact(post_b, 2, calibrate_bond_sign(bond.delta));
    if (std::abs(est_b - bond_kinetic(gs.state, 2)) > 1e-10)
        return fail("hard-core bond estimator not exact");
    return {};
}

std::string check_pair_isolation() {
    std::mt19937_64 rng(18);
    const LatticeSpec spec = uniform_spec(6, 1.0, 1.5, 1);
    auto basis = build_basis(6, 3, 1);
    const StateVector psi = random_state(rng, basis);
    MeasurementPlan plan;
    plan.kind = MeasurementPlan::Kind::current;
    plan.pairs = {1};
    const StateVector post = apply_protocol(psi, plan, spec);
    for (int s = 3; s <= 6; ++s)
        if (std::abs(post.site_population(s) - psi.site_population(s)) > 1e-12)
            return fail("protocol touched a site outside the plan pairs");
    return {};
}

std::string check_sampling_determinism() {
    const LatticeSpec spec = uniform_spec(4, 1.0, 1.0, 1);
    auto basis = build_basis(4, 2, 1);
    const EigenPair gs = ground_state(assemble(spec, basis));
    MeasurementPlan plan;
    plan.kind = MeasurementPlan::Kind::current;
    plan.pairs = {1};
    plan.shots = 5000;
    plan.seed = 424242;
    const ShotTable a = sample(gs.state, plan);
    const ShotTable b = sample(gs.state, plan);
    if (a.counts != b.counts) return fail("identical seeds produced different tables");
    plan.seed = 424243;
    const ShotTable c = sample(gs.state, plan);
    if (a.counts == c.counts) return fail("different seeds produced identical tables");
    return {};
}

std::string check_estimator_consistency() {
    const LatticeSpec spec = uniform_spec(6, 1.0, -1.22, 1);
    auto basis = build_basis(6, 3, 1);
    const EigenPair gs = ground_state(assemble(spec, basis));
    const double exact = current_correlation(gs.state, 1, 4, spec);
    MeasurementPlan plan;
    plan.kind = MeasurementPlan::Kind::current_correlation;
    plan.pairs = {1, 4};
    plan.shots = 4000;
    const StateVector post = apply_protocol(gs.state, plan, spec);
    double mean = 0.0, mean_err = 0.0;
    const int n_seeds = 20;
    for (int s = 0; s < n_seeds; ++s) {
        plan.seed = derive_seed(999, static_cast<std::uint64_t>(s));
        const ShotTable table = sample(post, plan);
        const Estimate est =
            estimate_current_correlation(table, 1, 4, spec.j_rung[0], spec.j_rung[3]);
        mean += est.value;
        mean_err += est.stderr_ * est.stderr_;
    }
    mean /= n_seeds;
    const double stderr_mean = std::sqrt(mean_err) / n_seeds;
    if (std::abs(mean - exact) > 3.0 * stderr_mean)
        return fail("estimator mean beyond 3 stderr of the exact value");
    return {};
}

std::string check_tbs_calibration() {
    const double j = 2.0 * M_PI * 6.1e6;
    const double analytic = calibrate_tbs(j);
    if (std::abs(analytic - 20.49e-9) > 5e-12) return fail("analytic t_bs off at J/2pi=6.1 MHz");
    if (std::abs(calibrate_tbs(2.0 * j) - 0.5 * analytic) > 1e-15)
        return fail("t_bs does not halve with doubled J");
    std::vector<double> times(60);
    for (std::size_t k = 0; k < times.size(); ++k)
        times[k] = static_cast<double>(k) * 2.0e-9;  // 0..118 ns
    const std::vector<double> pops = beamsplitter_trace(j, times);
    const double fitted = fit_tbs_from_trace(times, pops);
    if (std::abs(fitted - analytic) / analytic > 0.005)
        return fail("fitted t_bs misses the analytic value by more than 0.5%");
    return {};
}

std::string check_noise_model_validation() {
    NoiseModel model;
    model.t1 = {10e-6, 10e-6};
    model.t2r = {25e-6, 10e-6};  // 25 > 2*10
    try {
        model.validate(2);
        return fail("T2R > 2*T1 accepted");
    } catch (const Error& e) {
        if (e.code() != ErrorCode::invalid_argument) return fail("wrong error category");
    }
    return {};
}

std::string check_t1_decay() {
    auto multi = build_multi_sector_basis(1, 1, 1);
    const SparseOperator h(multi, {}, true);
    NoiseModel model;
    model.t1 = {20e-6};
    model.t2r = {30e-6};
    StateVector excited((BasisPtr(multi)));
    excited.amplitudes()(1) = 1.0;  // sector-1 block
    DensityMatrix rho = DensityMatrix::pure(excited);
    const double t = 15e-6;
    rho = lindblad_evolve(rho, h, model, t, 1e-7);
    const double expected = std::exp(-t / model.t1[0]);
    if (std::abs(rho.site_population(1) - expected) > 1e-6)
        return fail("T1 decay misses exp(-t/T1)");
    rho.check_invariants();
    return {};
}

std::string check_zero_noise_limit() {
    const LatticeSpec spec = uniform_spec(3, 1.0, 1.0, 1);
    auto multi = build_multi_sector_basis(3, 1, 1);
    const SparseOperator h = assemble(spec, multi);
    NoiseModel none;
    none.t1 = {1e30, 1e30, 1e30};
    none.t2r = {2e30, 2e30, 2e30};
    StateVector psi((BasisPtr(multi)));
    psi.amplitudes()(static_cast<Eigen::Index>(*multi->find(Occupation{1, 0, 0}))) = 1.0;
    const double t = 5.0;
    const StateVector exact = evolve(psi, h, t);
    DensityMatrix rho = lindblad_evolve(DensityMatrix::pure(psi), h, none, t, 0.01,
                                        {.rel_tol = 1e-10});
    const double fid_lb =
        (exact.amplitudes().adjoint() * rho.matrix() * exact.amplitudes())(0).real();
    if (fid_lb < 1.0 - 1e-8) return fail("zero-noise Lindblad drifted from unitary evolution");
    const auto traj = trajectory_evolve(psi, h, none, t, 0.01, 3, 7);
    for (const auto& tr : traj)
        if (std::norm(inner(exact, tr)) < 1.0 - 1e-8)
            return fail("zero-noise trajectory drifted from unitary evolution");
    return {};
}

std::string check_trajectory_lindblad_agreement() {
    const LatticeSpec two = uniform_spec(2, 1.0, 1.0, 1);
    auto multi = build_multi_sector_basis(2, 1, 1);
    const SparseOperator h = assemble(two, multi);
    NoiseModel model;
    model.t1 = {12.0, 15.0};
    model.t2r = {10.0, 14.0};
    StateVector psi((BasisPtr(multi)));
    psi.amplitudes()(static_cast<Eigen::Index>(*multi->find(Occupation{1, 0}))) = 1.0;
    const double t = 3.0;
    const DensityMatrix rho = lindblad_evolve(DensityMatrix::pure(psi), h, model, t, 0.02);
    const int n_traj = 400;
    const auto traj = trajectory_evolve(psi, h, model, t, 0.005, n_traj, 31);
    const SparseOperator n1 = number_operator(multi, 1);
    double mean = 0.0, var = 0.0;
    std::vector<double> vals;
    vals.reserve(traj.size());
    for (const auto& tr : traj) vals.push_back(real_expectation(n1, tr));
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(vals.size() - 1);
    const double sigma = std::sqrt(var / static_cast<double>(vals.size()));
    double rho_val = 0.0;
    for (std::size_t k = 0; k < multi->dim(); ++k)
        rho_val += rho.population(k) * multi->state(k)[0];
    if (std::abs(mean - rho_val) > 3.0 * std::max(sigma, 1e-4))
        return fail("trajectory ensemble beyond 3 sigma of dense Lindblad");
    return {};
}

std::string check_lindblad_invariants() {
    const LatticeSpec spec = uniform_spec(3, 1.0, -1.0, 1);
    auto multi = build_multi_sector_basis(3, 2, 1);
    const SparseOperator h = assemble(spec, multi);
    NoiseModel model;
    model.t1 = {8.0, 9.0, 10.0};
    model.t2r = {7.0, 8.0, 9.0};
    StateVector psi((BasisPtr(multi)));
    psi.amplitudes()(static_cast<Eigen::Index>(*multi->find(Occupation{1, 0, 1}))) = 1.0;
    DensityMatrix rho = DensityMatrix::pure(psi);
    for (int leg = 0; leg < 4; ++leg) {
        rho = lindblad_evolve(rho, h, model, 1.0, 0.02);
        rho.check_invariants(1e-8, 1e-10, 1e-8);
    }
    return {};
}

std::string check_config_schema() {
    const ExperimentConfig cfg = default_config();
    const ExperimentConfig again = parse_config(cfg.canonical_json);
    if (cfg.hash != again.hash) return fail("canonical config hash not stable");
    try {
        parse_config("{\"version\": 2}");
        return fail("unsupported schema version accepted");
    } catch (const Error&) {
    }
    try {
        parse_config("{\"version\": 1, \"lattice\": {\"n_sites\": 4, \"leg_ratio\": 1.0, "
                     "\"bogus\": 3}, \"total_number\": 2}");
        return fail("unknown lattice key accepted");
    } catch (const Error&) {
    }
    return {};
}

std::string check_output_determinism() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "fluxladder_verify";
    std::error_code ec;
    fs::remove_all(base, ec);
    auto make_cfg = [&](const std::string& sub) {
        ExperimentConfig cfg = parse_config(R"({
            "version": 1,
            "lattice": {"n_sites": 5, "n_max": 1, "j_rung_mhz": 6.1, "leg_ratio": -1.22},
            "total_number": 2,
            "sweep": {"ratios": [-1.22, 0.98]},
            "plans": [{"kind": "current", "pairs": [1], "shots": 2000}],
            "seed": 77
        })");
        cfg.output_dir = (base / sub).string();
        return cfg;
    };
    (void)run_sweep(make_cfg("a"));
    (void)run_sweep(make_cfg("b"));
    for (const std::string name : {"report_m1.22.json", "summary.csv"}) {
        const std::string f1 = read_file((base / "a" / name).string());
        const std::string f2 = read_file((base / "b" / name).string());
        if (f1 != f2) return fail("identical config+seed produced different " + name);
    }
    fs::remove_all(base, ec);
    return {};
}

}  // namespace

std::vector<CheckResult> run_verify(const ExperimentConfig* cfg) {
    const std::vector<std::pair<std::string, Check>> checks = {
        {"basis_counting", check_basis_counting},
        {"basis_index_roundtrip", check_index_roundtrip},
        {"hop_adjoint", check_hop_adjoint},
        {"hamiltonian_hermitian_number_conserving", check_hamiltonian_structure},
        {"sign_trick_spectrum", check_sign_trick},
        {"hardcore_xx_equivalence", check_xx_equivalence},
        {"gauge_covariance", check_gauge_covariance},
        {"beamsplitter_sqrt_iswap", check_sqrt_iswap},
        {"eigensolver_residual", check_eigensolver},
        {"evolve_unitarity", check_evolve_unitarity},
        {"degeneracy_flagging", check_degeneracy_flag},
        {"one_body_hermitian_trace", check_one_body},
        {"ground_state_currents_vanish", check_ground_currents},
        {"g_symmetry_reflection", check_g_symmetry},
        {"hardcore_estimator_exactness", check_hardcore_estimators},
        {"pair_isolation", check_pair_isolation},
        {"sampling_determinism", check_sampling_determinism},
        {"estimator_consistency", check_estimator_consistency},
        {"tbs_calibration", check_tbs_calibration},
        {"noise_model_validation", check_noise_model_validation},
        {"lindblad_t1_decay", check_t1_decay},
        {"zero_noise_limit", check_zero_noise_limit},
        {"trajectory_lindblad_agreement", check_trajectory_lindblad_agreement},
        {"lindblad_invariants", check_lindblad_invariants},
        {"config_schema", check_config_schema},
        {"output_determinism", check_output_determinism},
    };

    std::vector<CheckResult> results;
    if (cfg) {
        CheckResult c;
        c.name = "config_valid";
        try {
            cfg->lattice.validate();
            for (const auto& plan : cfg->plans) plan.validate(cfg->lattice.n_sites);
            if (cfg->noise) cfg->noise->validate(cfg->lattice.n_sites);
            c.pass = true;
            c.detail = "config hash " + cfg->hash;
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = e.what();
        }
        results.push_back(std::move(c));
    }
    for (const auto& [name, fn] : checks) {
        CheckResult r;
        r.name = name;
        try {
            const std::string detail = fn();
            r.pass = detail.empty();
            r.detail = detail.empty() ? "ok" : detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

std::vector<CheckResult> run_verify_file(const std::string& config_path) {
    std::optional<ExperimentConfig> cfg;
    CheckResult load;
    load.name = "config_valid";
    try {
        cfg = load_config(config_path);
        load.pass = true;
        load.detail = "config hash " + cfg->hash;
    } catch (const std::exception& e) {
        load.pass = false;
        load.detail = e.what();
    }
    std::vector<CheckResult> results;
    if (cfg) {
        results = run_verify(&*cfg);
    } else {
        results = run_verify(nullptr);
        results.insert(results.begin(), load);
    }
    return results;
}

}  // namespace fluxladder
