#include "fluxladder/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fluxladder/errors.hpp"
#include "fluxladder/util.hpp"

namespace fluxladder {

void MeasurementPlan::validate(int n_sites) const {
    const int n_rungs = n_sites - 1;
    if (pairs.empty() || pairs.size() > 2) throw_invalid("plan: need one or two rung pairs");
    for (int p : pairs)
        if (p < 1 || p > n_rungs) throw_invalid("plan: rung pair out of range");
    if (pairs.size() == 2 && std::abs(pairs[0] - pairs[1]) < 2)
        throw_non_measurable("plan: overlapping pairs share a site (non-measurable pair)");
    if (kind == Kind::current_correlation && pairs.size() != 2)
        throw_invalid("plan: correlation plans need exactly two disjoint pairs");
    if (shots < 1) throw_invalid("plan: shots must be >= 1");
    if (!t_bs.empty() && t_bs.size() != pairs.size())
        throw_invalid("plan: t_bs must have one entry per pair");
    for (double t : t_bs)
        if (t < 0.0) throw_invalid("plan: t_bs must be positive (0 = auto)");
    if (kind == Kind::bond_kinetic) {
        if (delta == 0.0) throw_invalid("plan: bond plans need a nonzero idle detuning");
        if (t_idle < 0.0) throw_invalid("plan: t_idle must be positive (0 = auto)");
    }
}

std::string ShotTable::csv() const {
    std::ostringstream os;
    os << "bitstring,count\n";
    for (const auto& [s, c] : counts) os << s << ',' << c << '\n';
    return os.str();
}

double calibrate_tbs(double j_rung) {
    if (!(j_rung > 0.0)) throw_invalid("calibrate_tbs: J must be > 0");
    return M_PI / (4.0 * j_rung);
}

std::vector<double> beamsplitter_trace(double j_rung, std::span<const double> times) {
    // Two isolated hard-core sites, one particle, starting in |10>.
    LatticeSpec spec;
    spec.n_sites = 2;
    spec.omega = {0.0, 0.0};
    spec.u = {0.0, 0.0};
    spec.j_rung = {j_rung};
    spec.n_max = 1;
    auto basis = build_basis(2, 1, 1);
    const StateVector psi0 = product_state(basis, {1, 0});
    const SparseOperator h_bs =
        assemble_pair({PairHamiltonianSpec::Kind::beamsplitter, 1, -j_rung}, basis);
    std::vector<double> pops;
    pops.reserve(times.size());
    for (double t : times) pops.push_back(evolve(psi0, h_bs, t).site_population(1));
    return pops;
}

double fit_tbs_from_trace(std::span<const double> times, std::span<const double> populations) {
    if (times.size() != populations.size() || times.size() < 8)
        throw_invalid("fit_tbs_from_trace: need matching time/population arrays (>= 8 points)");
    const double span = times.back() - times.front();
    if (!(span > 0.0)) throw_invalid("fit_tbs_from_trace: times must be increasing");

    // p(t) = a cos(w t) + c; (a, c) solved linearly for each trial frequency.
    const auto sse_at = [&](double w, double* a_out = nullptr, double* c_out = nullptr) {
        double s_cc = 0.0, s_c = 0.0, s_pc = 0.0, s_p = 0.0;
        const auto n = static_cast<double>(times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double ck = std::cos(w * times[k]);
            s_cc += ck * ck;
            s_c += ck;
            s_pc += populations[k] * ck;
            s_p += populations[k];
        }
        const double det = s_cc * n - s_c * s_c;
        if (std::abs(det) < 1e-12) return std::numeric_limits<double>::infinity();
        const double a = (s_pc * n - s_p * s_c) / det;
        const double c = (s_p * s_cc - s_pc * s_c) / det;
        if (a_out) *a_out = a;
        if (c_out) *c_out = c;
        double sse = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double r = populations[k] - (a * std::cos(w * times[k]) + c);
            sse += r * r;
        }
        return sse;
    };

    // Coarse scan up to the Nyquist frequency of the sampling grid.
    double dt_min = span;
    for (std::size_t k = 1; k < times.size(); ++k) dt_min = std::min(dt_min, times[k] - times[k - 1]);
    const double w_max = M_PI / dt_min;
    const double w_min = 0.5 * M_PI / span;
    double best_w = w_min, best_sse = std::numeric_limits<double>::infinity();
    const int n_grid = 4000;
    for (int g = 0; g <= n_grid; ++g) {
        const double w = w_min + (w_max - w_min) * static_cast<double>(g) / n_grid;
        const double sse = sse_at(w);
        if (sse < best_sse) {
            best_sse = sse;
            best_w = w;
        }
    }
    // Golden-section refinement around the best grid point.
    double lo = std::max(w_min, best_w - (w_max - w_min) / n_grid);
    double hi = std::min(w_max, best_w + (w_max - w_min) / n_grid);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = sse_at(x1), f2 = sse_at(x2);
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * best_w; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = sse_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = sse_at(x2);
        }
    }
    const double w_fit = 0.5 * (lo + hi);
    const double rms = std::sqrt(sse_at(w_fit) / static_cast<double>(times.size()));
    if (rms > 0.05) {
        std::ostringstream msg;
        msg << "fit_tbs_from_trace: fit did not converge (rms residual " << rms << ")";
        throw_numeric(msg.str());
    }
    if (w_fit * span < 0.99 * M_PI)
        throw_invalid("fit_tbs_from_trace: trace covers less than half an oscillation");
    // population oscillates at 2J, so t_bs = pi/(4J) = pi/(2 w_fit)
    return M_PI / (2.0 * w_fit);
}

SparseOperator onsite_diagonal(const LatticeSpec& spec, BasisPtr basis) {
    std::vector<Triplet> trips;
    for (std::size_t k = 0; k < basis->dim(); ++k) {
        auto occ = basis->state(k);
        double diag = 0.0;
        for (int s = 0; s < spec.n_sites; ++s) {
            const double ns = occ[static_cast<std::size_t>(s)];
            diag += spec.omega[static_cast<std::size_t>(s)] * ns +
                    0.5 * spec.u[static_cast<std::size_t>(s)] * ns * (ns - 1.0);
        }
        if (diag != 0.0)
            trips.emplace_back(static_cast<int>(k), static_cast<int>(k), Complex(diag, 0.0));
    }
    return SparseOperator(std::move(basis), std::move(trips), true);
}

std::vector<ProtocolWindow> protocol_windows(const MeasurementPlan& plan, const LatticeSpec& spec,
                                             BasisPtr basis) {
    plan.validate(spec.n_sites);
    if (basis->n_sites() != spec.n_sites)
        throw_mismatch("protocol_windows: basis and spec disagree on n_sites");
    const SparseOperator onsite = onsite_diagonal(spec, basis);

    std::vector<ProtocolWindow> windows;
    if (plan.kind == MeasurementPlan::Kind::bond_kinetic) {
        const double t_idle = plan.t_idle > 0.0 ? plan.t_idle : M_PI / (4.0 * std::abs(plan.delta));
        SparseOperator h_idle = onsite;
        for (int p : plan.pairs)
            h_idle += assemble_pair({PairHamiltonianSpec::Kind::idle, p, plan.delta}, basis);
        windows.push_back({std::move(h_idle), t_idle});
    }

    // Pair isolation: plan pairs evolve simultaneously, each under its own
    // pair-restricted lattice Hamiltonian -J_p (a^dag a + h.c.) with the
    // onsite terms on; pairs drop out as their beamsplitter times elapse.
    std::vector<std::pair<double, int>> timed;  // (t_bs, pair)
    for (std::size_t i = 0; i < plan.pairs.size(); ++i) {
        const int p = plan.pairs[i];
        const double j_p = spec.j_rung[static_cast<std::size_t>(p - 1)];
        const double t_p =
            (!plan.t_bs.empty() && plan.t_bs[i] > 0.0) ? plan.t_bs[i] : calibrate_tbs(j_p);
        timed.emplace_back(t_p, p);
    }
    std::sort(timed.begin(), timed.end());
    double elapsed = 0.0;
    for (std::size_t w = 0; w < timed.size(); ++w) {
        const double span = timed[w].first - elapsed;
        if (span <= 0.0) continue;  // identical times collapse into one window
        SparseOperator h = onsite;
        for (std::size_t rest = w; rest < timed.size(); ++rest)
            h += assemble_pair({PairHamiltonianSpec::Kind::beamsplitter, timed[rest].second,
                                -spec.j_rung[static_cast<std::size_t>(timed[rest].second - 1)]},
                               basis);
        windows.push_back({std::move(h), span});
        elapsed = timed[w].first;
    }
    return windows;
}

StateVector apply_protocol(const StateVector& state, const MeasurementPlan& plan,
                           const LatticeSpec& spec) {
    StateVector psi = state;
    for (const auto& window : protocol_windows(plan, spec, psi.basis()))
        psi = evolve(psi, window.hamiltonian, window.duration);
    return psi;
}

ShotTable sample_probabilities(const BasisBase& basis, std::span<const double> probs,
                               const MeasurementPlan& plan) {
    if (probs.size() != basis.dim()) throw_mismatch("sample: probability vector size mismatch");
    std::vector<double> weights(probs.begin(), probs.end());
    for (double& w : weights) w = std::max(0.0, w);
    const std::vector<double> cum = cumulative_sum(weights);
    const double total_w = cum.empty() ? 0.0 : cum.back();
    if (!(total_w > 0.0)) throw_numeric("sample: all probabilities vanished");

    std::mt19937_64 rng(plan.seed);
    ShotTable table;
    table.seed = plan.seed;
    table.plan = plan;
    table.total = plan.shots;
    for (std::uint64_t s = 0; s < plan.shots; ++s) {
        const std::size_t k = sample_index(cum, total_w, rng);
        std::string key;
        auto occ = basis.state(k);
        key.reserve(occ.size());
        if (plan.readout == MeasurementPlan::Readout::binary)
            for (std::uint8_t n : occ) key.push_back(n > 0 ? '1' : '0');
        else
            key = occupation_string(occ);
        ++table.counts[key];
    }
    return table;
}

ShotTable sample(const StateVector& state, const MeasurementPlan& plan) {
    const auto& basis = *state.basis();
    std::vector<double> probs(basis.dim());
    for (std::size_t k = 0; k < basis.dim(); ++k) probs[k] = state.probability(k);
    return sample_probabilities(basis, probs, plan);
}

namespace {

int require_pair_in_plan(const ShotTable& table, int pair) {
    const auto& pairs = table.plan.pairs;
    auto it = std::find(pairs.begin(), pairs.end(), pair);
    if (it == pairs.end()) throw_invalid("estimator: pair not in the plan this table came from");
    return static_cast<int>(it - pairs.begin());
}

double digit_diff(const std::string& s, int pair) {
    // measured n_j - n_{j+1}, site digits as recorded (already clipped when
    // the table was taken in binary readout)
    const auto j = static_cast<std::size_t>(pair - 1);
    return static_cast<double>(s[j] - '0') - static_cast<double>(s[j + 1] - '0');
}

struct MeanVar {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MeanVar table_mean(const ShotTable& table, int pair) {
    const auto n = static_cast<double>(table.total);
    double sum = 0.0, sumsq = 0.0;
    for (const auto& [s, c] : table.counts) {
        const double x = digit_diff(s, pair);
        sum += static_cast<double>(c) * x;
        sumsq += static_cast<double>(c) * x * x;
    }
    MeanVar mv;
    mv.mean = sum / n;
    const double var = n > 1.0 ? std::max(0.0, (sumsq - n * mv.mean * mv.mean) / (n - 1.0)) : 0.0;
    mv.stderr_ = std::sqrt(var / n);
    return mv;
}

}  // namespace

Estimate estimate_current(const ShotTable& table, int pair, double j_rung) {
    if (table.plan.kind != MeasurementPlan::Kind::current &&
        table.plan.kind != MeasurementPlan::Kind::current_correlation)
        throw_invalid("estimate_current: table does not come from a current plan");
    require_pair_in_plan(table, pair);
    const MeanVar mv = table_mean(table, pair);
    return {j_rung * mv.mean, j_rung * mv.stderr_};
}

Estimate estimate_current_correlation(const ShotTable& table, int pair_i, int pair_j, double j_i,
                                      double j_j) {
    if (table.plan.kind != MeasurementPlan::Kind::current_correlation)
        throw_invalid("estimate_current_correlation: table does not come from a correlation plan");
    require_pair_in_plan(table, pair_i);
    require_pair_in_plan(table, pair_j);
    if (std::abs(pair_i - pair_j) < 2)
        throw_non_measurable("estimate_current_correlation: non-measurable pair");

    const double n = static_cast<double>(table.total);
    double sx = 0.0, sy = 0.0, sxy = 0.0;
    for (const auto& [s, c] : table.counts) {
        const double x = digit_diff(s, pair_i);
        const double y = digit_diff(s, pair_j);
        sx += static_cast<double>(c) * x;
        sy += static_cast<double>(c) * y;
        sxy += static_cast<double>(c) * x * y;
    }
    const double scale = j_i * j_j;
    const double value = scale * (sxy / n - (sx / n) * (sy / n));
    if (table.total < 2) return {value, 0.0};

    // Jackknife over shots, grouped by distinct outcome.
    const double m = n - 1.0;
    double theta_sum = 0.0;
    std::vector<std::pair<double, double>> thetas;  // (theta_leave_one_out, count)
    thetas.reserve(table.counts.size());
    for (const auto& [s, c] : table.counts) {
        const double x = digit_diff(s, pair_i);
        const double y = digit_diff(s, pair_j);
        const double th =
            scale * ((sxy - x * y) / m - ((sx - x) / m) * ((sy - y) / m));
        thetas.emplace_back(th, static_cast<double>(c));
        theta_sum += th * static_cast<double>(c);
    }
    const double theta_bar = theta_sum / n;
    double var_jack = 0.0;
    for (const auto& [th, c] : thetas) var_jack += c * (th - theta_bar) * (th - theta_bar);
    var_jack *= m / n;
    return {value, std::sqrt(var_jack)};
}

Estimate estimate_bond_kinetic(const ShotTable& table, int pair, int sign_convention) {
    if (table.plan.kind != MeasurementPlan::Kind::bond_kinetic)
        throw_invalid("estimate_bond_kinetic: table does not come from a bond plan");
    if (sign_convention != 1 && sign_convention != -1)
        throw_invalid("estimate_bond_kinetic: sign convention must be +1 or -1");
    require_pair_in_plan(table, pair);
    const MeanVar mv = table_mean(table, pair);
    return {static_cast<double>(sign_convention) * mv.mean, mv.stderr_};
}

namespace {

double clipped_digit(std::uint8_t n, MeasurementPlan::Readout readout) {
    if (readout == MeasurementPlan::Readout::binary) return n > 0 ? 1.0 : 0.0;
    return static_cast<double>(n);
}

// E[n_p - n_{p+1}] over the Born distribution of `state`.
double exact_mean_diff(const StateVector& state, int pair, MeasurementPlan::Readout readout) {
    const auto& basis = *state.basis();
    const auto j = static_cast<std::size_t>(pair - 1);
    double mean = 0.0;
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const double p = state.probability(k);
        if (p == 0.0) continue;
        auto occ = basis.state(k);
        mean += p * (clipped_digit(occ[j], readout) - clipped_digit(occ[j + 1], readout));
    }
    return mean;
}

}  // namespace

double estimate_current_exact(const StateVector& post_state, int pair, double j_rung,
                              MeasurementPlan::Readout readout) {
    return j_rung * exact_mean_diff(post_state, pair, readout);
}

double estimate_current_correlation_exact(const StateVector& post_state, int pair_i, int pair_j,
                                          double j_i, double j_j,
                                          MeasurementPlan::Readout readout) {
    if (std::abs(pair_i - pair_j) < 2)
        throw_non_measurable("estimate_current_correlation_exact: non-measurable pair");
    const auto& basis = *post_state.basis();
    const auto i = static_cast<std::size_t>(pair_i - 1);
    const auto j = static_cast<std::size_t>(pair_j - 1);
    double ex = 0.0, ey = 0.0, exy = 0.0;
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const double p = post_state.probability(k);
        if (p == 0.0) continue;
        auto occ = basis.state(k);
        const double x = clipped_digit(occ[i], readout) - clipped_digit(occ[i + 1], readout);
        const double y = clipped_digit(occ[j], readout) - clipped_digit(occ[j + 1], readout);
        ex += p * x;
        ey += p * y;
        exy += p * x * y;
    }
    return j_i * j_j * (exy - ex * ey);
}

double estimate_bond_kinetic_exact(const StateVector& post_state, int pair, int sign_convention,
                                   MeasurementPlan::Readout readout) {
    if (sign_convention != 1 && sign_convention != -1)
        throw_invalid("estimate_bond_kinetic_exact: sign convention must be +1 or -1");
    return static_cast<double>(sign_convention) * exact_mean_diff(post_state, pair, readout);
}

int calibrate_bond_sign(double delta) {
    if (delta == 0.0) throw_invalid("calibrate_bond_sign: delta must be nonzero");
    LatticeSpec spec;
    spec.n_sites = 2;
    spec.omega = {0.0, 0.0};
    spec.u = {0.0, 0.0};
    spec.j_rung = {1.0};
    spec.n_max = 1;
    auto basis = build_basis(2, 1, 1);
    StateVector psi(basis);
    const auto i10 = basis->find(Occupation{1, 0});
    const auto i01 = basis->find(Occupation{0, 1});
    psi.amplitudes()(static_cast<Eigen::Index>(*i10)) = M_SQRT1_2;
    psi.amplitudes()(static_cast<Eigen::Index>(*i01)) = M_SQRT1_2;

    MeasurementPlan plan;
    plan.kind = MeasurementPlan::Kind::bond_kinetic;
    plan.pairs = {1};
    plan.delta = delta;
    const StateVector post = apply_protocol(psi, plan, spec);
    // known state has O = +1; pick the sign that reproduces it
    const double raw = estimate_bond_kinetic_exact(post, 1, +1);
    return raw >= 0.0 ? +1 : -1;
}

}  // namespace fluxladder
