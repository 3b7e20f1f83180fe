#pragma once

#include <map>
#include <optional>

#include "fluxladder/hamiltonian.hpp"

namespace fluxladder {

// Exact and shot-estimated observables of one prepared state.  Currents are
// reported in units of the mean rung coupling (J), current correlations in
// units of J^2; bond kinetic energies are dimensionless coherences.  The
// `errors` block is present only for shot-estimated entries.
struct ObservableReport {
    int n_sites = 0;
    double j_mean = 0.0;  // rad/s, the normalization unit
    Eigen::MatrixXcd one_body;                      // <a_i^dag a_j>
    std::vector<double> currents;                   // <J_j>/J per rung
    std::map<std::pair<int, int>, double> g_matrix;  // G(i,j)/J^2, i<j, j-i>=2
    double chiral_c = 0.0;                          // C/J^2
    std::vector<double> bond_o;                     // O_j per rung
    double bond_order = 0.0;                        // O_BO

    std::vector<double> current_err;  // optional, same layout as currents
    std::map<std::pair<int, int>, double> g_err;
    std::vector<double> bond_err;
    double chiral_c_err = 0.0;
    double bond_order_err = 0.0;

    std::string units_note = "currents in units of mean rung J; G and C in units of J^2";
};

// One-body density matrix <a_i^dag a_j>; Hermitian, trace = total number.
Eigen::MatrixXcd one_body_matrix(const StateVector& state);

// <J_rung> in rad/s (not normalized).  Computed as the operator expectation
// and cross-checked against 2 J Im<a_j^dag a_{j+1}> internally.
double rung_current(const StateVector& state, int rung, const LatticeSpec& spec);

// G(i,j) = <J_i J_j> - <J_i><J_j> via exact operator products (rad/s)^2.
// Rungs sharing a site (|i-j| == 1) are rejected: J_i J_j is not Hermitian
// there, the pair is non-measurable.  i == j (the variance) is allowed.
double current_correlation(const StateVector& state, int rung_i, int rung_j,
                           const LatticeSpec& spec);

// Rung pairs entering the correlation analysis: i < j, j - i >= 2.
std::vector<std::pair<int, int>> measurable_rung_pairs(int n_sites);

// C = sum_d (1/n_d) sum_j G(j, j+d), d = 2..n_rungs-1, n_d = n_rungs - d
// (the number of measurable pairs at that distance), in (rad/s)^2.
double chiral_order(const StateVector& state, const LatticeSpec& spec);

// O_j = 2 Re<a_j^dag a_{j+1}> and its staggered sum
// O_BO = sum_j (-1)^j (<a_j^dag a_{j+1}> + <a_{j+1}^dag a_j>).
double bond_kinetic(const StateVector& state, int rung);
double bond_order(const StateVector& state);

// Full exact report for a state prepared under `spec`.
ObservableReport exact_report(const StateVector& state, const LatticeSpec& spec);

// JSON / CSV serialization (G rows: rung_i, rung_j, value, stderr).
std::string report_json(const ObservableReport& report);
ObservableReport report_from_json(const std::string& text);
std::string g_matrix_csv(const ObservableReport& report);

}  // namespace fluxladder
