#include "fluxladder/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "fluxladder/errors.hpp"
#include "fluxladder/util.hpp"

namespace fluxladder {

using nlohmann::json;

Eigen::MatrixXcd one_body_matrix(const StateVector& state) {
    const auto& basis = *state.basis();
    const int n = basis.n_sites();
    Eigen::MatrixXcd rho1 = Eigen::MatrixXcd::Zero(n, n);
    Occupation scratch(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const Complex a = state.amplitudes()(static_cast<Eigen::Index>(k));
        if (a == Complex(0.0)) continue;
        auto occ = basis.state(k);
        // diagonal: populations
        for (int i = 0; i < n; ++i)
            rho1(i, i) += std::norm(a) * static_cast<double>(occ[static_cast<std::size_t>(i)]);
        // off-diagonal: <a_i^dag a_j>, j -> i transfer amplitudes
        for (int j = 0; j < n; ++j) {
            const int nj = occ[static_cast<std::size_t>(j)];
            if (nj == 0) continue;
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                const int ni = occ[static_cast<std::size_t>(i)];
                if (ni + 1 > basis.n_max()) continue;
                std::copy(occ.begin(), occ.end(), scratch.begin());
                scratch[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(nj - 1);
                scratch[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(ni + 1);
                auto idx = basis.find(scratch);
                if (!idx) continue;
                const double factor =
                    std::sqrt(static_cast<double>(nj) * static_cast<double>(ni + 1));
                rho1(i, j) +=
                    std::conj(state.amplitudes()(static_cast<Eigen::Index>(*idx))) * factor * a;
            }
        }
    }
    return rho1;
}

double rung_current(const StateVector& state, int rung, const LatticeSpec& spec) {
    if (rung < 1 || rung > spec.n_sites - 1) throw_invalid("rung_current: rung out of range");
    const double j_rung = spec.j_rung[static_cast<std::size_t>(rung - 1)];
    const double via_op = real_expectation(current_operator(rung, spec, state.basis()), state);
    // Independent route through the one-body matrix:
    //   <J> = i J (z - z*) = 2 J Im<a_{j+1}^dag a_j>  with z = <a_j^dag a_{j+1}>
    const Eigen::MatrixXcd rho1 = one_body_matrix(state);
    const double via_coherence = 2.0 * j_rung * rho1(rung, rung - 1).imag();
    if (std::abs(via_op - via_coherence) > 1e-12 * (1.0 + 2.0 * j_rung + std::abs(via_op)))
        throw_numeric("rung_current: operator and coherence routes disagree");
    return via_op;
}

double current_correlation(const StateVector& state, int rung_i, int rung_j,
                           const LatticeSpec& spec) {
    const int n_rungs = spec.n_sites - 1;
    if (rung_i < 1 || rung_i > n_rungs || rung_j < 1 || rung_j > n_rungs)
        throw_invalid("current_correlation: rung out of range");
    if (std::abs(rung_i - rung_j) == 1)
        throw_non_measurable(
            "current_correlation: non-measurable pair (rungs share a site, J_i J_j is not "
            "Hermitian)");

    const SparseOperator ji = current_operator(rung_i, spec, state.basis());
    const SparseOperator jj = current_operator(rung_j, spec, state.basis());
    const StateVector x = ji.apply(state);
    const StateVector y = jj.apply(state);
    const Complex prod = inner(x, y);  // <psi| J_i J_j |psi>, J_i Hermitian
    const double jj_scale = spec.j_rung[static_cast<std::size_t>(rung_i - 1)] *
                            spec.j_rung[static_cast<std::size_t>(rung_j - 1)];
    if (std::abs(prod.imag()) > 1e-10 * (jj_scale + std::abs(prod.real())))
        throw_numeric("current_correlation: <J_i J_j> came out non-real");
    const double mean_i = real_expectation(ji, state);
    const double mean_j = real_expectation(jj, state);
    return prod.real() - mean_i * mean_j;
}

std::vector<std::pair<int, int>> measurable_rung_pairs(int n_sites) {
    std::vector<std::pair<int, int>> pairs;
    const int n_rungs = n_sites - 1;
    for (int i = 1; i <= n_rungs; ++i)
        for (int j = i + 2; j <= n_rungs; ++j) pairs.emplace_back(i, j);
    return pairs;
}

double chiral_order(const StateVector& state, const LatticeSpec& spec) {
    if (spec.n_sites < 4) throw_invalid("chiral_order: need at least 4 sites");
    const int n_rungs = spec.n_sites - 1;
    double c = 0.0;
    for (int d = 2; d <= n_rungs - 1; ++d) {
        const int n_d = n_rungs - d;  // measurable pairs at this distance
        double sum = 0.0;
        for (int j = 1; j + d <= n_rungs; ++j) sum += current_correlation(state, j, j + d, spec);
        c += sum / static_cast<double>(n_d);
    }
    return c;
}

double bond_kinetic(const StateVector& state, int rung) {
    if (rung < 1 || rung > state.basis()->n_sites() - 1)
        throw_invalid("bond_kinetic: rung out of range");
    return real_expectation(bond_operator(rung, state.basis()), state);
}

double bond_order(const StateVector& state) {
    const int n_rungs = state.basis()->n_sites() - 1;
    double o = 0.0;
    for (int j = 1; j <= n_rungs; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        o += sign * bond_kinetic(state, j);
    }
    return o;
}

ObservableReport exact_report(const StateVector& state, const LatticeSpec& spec) {
    ObservableReport rep;
    rep.n_sites = spec.n_sites;
    rep.j_mean = spec.mean_rung();
    const double jm = rep.j_mean > 0.0 ? rep.j_mean : 1.0;
    rep.one_body = one_body_matrix(state);
    const int n_rungs = spec.n_sites - 1;
    rep.currents.resize(static_cast<std::size_t>(n_rungs));
    rep.bond_o.resize(static_cast<std::size_t>(n_rungs));
    for (int j = 1; j <= n_rungs; ++j) {
        rep.currents[static_cast<std::size_t>(j - 1)] = rung_current(state, j, spec) / jm;
        rep.bond_o[static_cast<std::size_t>(j - 1)] = bond_kinetic(state, j);
    }
    for (auto [i, j] : measurable_rung_pairs(spec.n_sites))
        rep.g_matrix[{i, j}] = current_correlation(state, i, j, spec) / (jm * jm);
    rep.chiral_c = spec.n_sites >= 4 ? chiral_order(state, spec) / (jm * jm) : 0.0;
    rep.bond_order = bond_order(state);
    return rep;
}

std::string report_json(const ObservableReport& rep) {
    json j;
    j["n_sites"] = rep.n_sites;
    j["j_mean_rad_per_s"] = rep.j_mean;
    j["units"] = rep.units_note;
    json ob = json::array();
    for (int r = 0; r < rep.one_body.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < rep.one_body.cols(); ++c)
            row.push_back({rep.one_body(r, c).real(), rep.one_body(r, c).imag()});
        ob.push_back(row);
    }
    j["one_body"] = ob;
    j["currents"] = rep.currents;
    json g = json::array();
    for (const auto& [key, value] : rep.g_matrix) {
        json entry;
        entry["i"] = key.first;
        entry["j"] = key.second;
        entry["value"] = value;
        if (auto it = rep.g_err.find(key); it != rep.g_err.end()) entry["stderr"] = it->second;
        g.push_back(entry);
    }
    j["g_matrix"] = g;
    j["chiral_c"] = rep.chiral_c;
    j["bond_o"] = rep.bond_o;
    j["bond_order"] = rep.bond_order;
    if (!rep.current_err.empty()) j["current_err"] = rep.current_err;
    if (!rep.bond_err.empty()) j["bond_err"] = rep.bond_err;
    if (rep.chiral_c_err != 0.0) j["chiral_c_err"] = rep.chiral_c_err;
    if (rep.bond_order_err != 0.0) j["bond_order_err"] = rep.bond_order_err;
    return j.dump(2);
}

ObservableReport report_from_json(const std::string& text) {
    json j = json::parse(text);
    ObservableReport rep;
    rep.n_sites = j.at("n_sites").get<int>();
    rep.j_mean = j.at("j_mean_rad_per_s").get<double>();
    rep.units_note = j.value("units", rep.units_note);
    const auto& ob = j.at("one_body");
    const auto n = static_cast<Eigen::Index>(ob.size());
    rep.one_body.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto& pair = ob.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
            rep.one_body(r, c) = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
        }
    rep.currents = j.at("currents").get<std::vector<double>>();
    for (const auto& entry : j.at("g_matrix")) {
        const int gi = entry.at("i").get<int>();
        const int gj = entry.at("j").get<int>();
        rep.g_matrix[{gi, gj}] = entry.at("value").get<double>();
        if (entry.contains("stderr")) rep.g_err[{gi, gj}] = entry.at("stderr").get<double>();
    }
    rep.chiral_c = j.at("chiral_c").get<double>();
    rep.bond_o = j.at("bond_o").get<std::vector<double>>();
    rep.bond_order = j.at("bond_order").get<double>();
    if (j.contains("current_err")) rep.current_err = j.at("current_err").get<std::vector<double>>();
    if (j.contains("bond_err")) rep.bond_err = j.at("bond_err").get<std::vector<double>>();
    rep.chiral_c_err = j.value("chiral_c_err", 0.0);
    rep.bond_order_err = j.value("bond_order_err", 0.0);
    return rep;
}

std::string g_matrix_csv(const ObservableReport& rep) {
    std::ostringstream os;
    os << "rung_i,rung_j,value,stderr\n";
    for (const auto& [key, value] : rep.g_matrix) {
        double err = 0.0;
        if (auto it = rep.g_err.find(key); it != rep.g_err.end()) err = it->second;
        os << key.first << ',' << key.second << ',' << fmt_double(value) << ',' << fmt_double(err)
           << '\n';
    }
    return os.str();
}

}  // namespace fluxladder
