#include "fluxladder/runner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include <json.hpp>

#include "fluxladder/errors.hpp"
#include "fluxladder/svg.hpp"
#include "fluxladder/util.hpp"

namespace fluxladder {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string ratio_tag(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%.4g", ratio < 0.0 ? "m" : "p", std::abs(ratio));
    return buf;
}

std::string plan_kind_name(MeasurementPlan::Kind k) {
    switch (k) {
        case MeasurementPlan::Kind::current: return "current";
        case MeasurementPlan::Kind::current_correlation: return "corr";
        case MeasurementPlan::Kind::bond_kinetic: return "bond";
    }
    return "plan";
}

RampSchedule build_schedule(const ExperimentConfig& cfg) {
    const auto& rc = *cfg.ramp;
    const auto n = static_cast<std::size_t>(cfg.lattice.n_sites);
    RampSchedule schedule;
    schedule.dt = rc.dt_s;
    schedule.initial_occupations.assign(n, 0);
    for (int s : rc.excited_sites)
        schedule.initial_occupations[static_cast<std::size_t>(s - 1)] = 1;
    if (rc.duration_s > 0.0) {
        RampSegment seg;
        seg.duration_s = rc.duration_s;
        seg.shape = rc.shape;
        seg.detuning_start.assign(n, 0.0);
        seg.detuning_end.assign(n, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            const bool excited = std::find(rc.excited_sites.begin(), rc.excited_sites.end(),
                                           static_cast<int>(s) + 1) != rc.excited_sites.end();
            if (!excited) seg.detuning_start[s] = rc.park_detuning;
        }
        schedule.segments.push_back(std::move(seg));
    }
    return schedule;
}

int state_total(const BasisBase& basis) {
    int total = 0;
    for (auto v : basis.state(0)) total += v;
    return total;
}

// Protocol + readout through the open-system pipeline: the density matrix
// decoheres for the duration of each protocol window before sampling.
ShotTable sample_noisy_density(const DensityMatrix& rho0, const MeasurementPlan& plan,
                               const LatticeSpec& spec, const NoiseModel& noise,
                               double rel_tol) {
    DensityMatrix rho = rho0;
    LindbladOptions opts;
    opts.rel_tol = rel_tol;
    for (const auto& window : protocol_windows(plan, spec, rho.basis()))
        rho = lindblad_evolve(rho, window.hamiltonian, noise, window.duration,
                              window.duration / 16.0, opts);

    const auto& basis = *rho.basis();
    std::vector<double> probs(basis.dim());
    for (std::size_t k = 0; k < basis.dim(); ++k) probs[k] = rho.population(k);
    return sample_probabilities(basis, probs, plan);
}

ShotTable sample_noisy(const StateVector& state, const MeasurementPlan& plan,
                       const LatticeSpec& spec, const NoiseModel& noise, double rel_tol) {
    // damping only lowers the total, so sectors above the state's own total
    // are unreachable
    auto multi = build_multi_sector_basis(spec.n_sites, state_total(*state.basis()), spec.n_max);
    return sample_noisy_density(DensityMatrix::pure(embed_multi_sector(state, multi)), plan, spec,
                                noise, rel_tol);
}

// Open-system preparation: integrates the Lindblad equation through the ramp
// schedule with the Hamiltonian frozen over macro steps (the detunings move
// slowly against the protocol timescales).
DensityMatrix noisy_ramp_density(const ExperimentConfig& cfg, const LatticeSpec& hw,
                                 const RampSchedule& schedule,
                                 const std::shared_ptr<const MultiSectorBasis>& multi) {
    auto fixed = build_basis(hw.n_sites, cfg.total_number, hw.n_max);
    DensityMatrix rho = DensityMatrix::pure(
        embed_multi_sector(product_state(fixed, schedule.initial_occupations), multi));
    LindbladOptions opts;
    opts.rel_tol = cfg.lindblad_rel_tol;
    for (const auto& seg : schedule.segments) {
        const double macro = std::max(schedule.dt, seg.duration_s / 256.0);
        const auto n_steps = static_cast<std::size_t>(std::ceil(seg.duration_s / macro));
        const double dt = seg.duration_s / static_cast<double>(n_steps);
        for (std::size_t step = 0; step < n_steps; ++step) {
            const double frac = (static_cast<double>(step) + 0.5) / static_cast<double>(n_steps);
            LatticeSpec frozen = hw;
            for (std::size_t s = 0; s < frozen.omega.size(); ++s)
                frozen.omega[s] += ramp_shape_value(seg.shape, seg.detuning_start[s],
                                                    seg.detuning_end[s], frac);
            rho = lindblad_evolve(rho, assemble(frozen, multi), *cfg.noise, dt, dt / 4.0, opts);
        }
    }
    return rho;
}

struct EstimatorAccumulator {
    ObservableReport report;
    int g_measured = 0;
    int currents_measured = 0;
    int bonds_measured = 0;
};

void apply_estimates(EstimatorAccumulator& acc, const MeasurementPlan& plan,
                     const ShotTable& table, const LatticeSpec& spec) {
    const double jm = spec.mean_rung();
    switch (plan.kind) {
        case MeasurementPlan::Kind::current: {
            for (int p : plan.pairs) {
                const double j_p = spec.j_rung[static_cast<std::size_t>(p - 1)];
                const Estimate est = estimate_current(table, p, j_p);
                acc.report.currents[static_cast<std::size_t>(p - 1)] = est.value / jm;
                acc.report.current_err[static_cast<std::size_t>(p - 1)] = est.stderr_ / jm;
                ++acc.currents_measured;
            }
            break;
        }
        case MeasurementPlan::Kind::current_correlation: {
            const int i = std::min(plan.pairs[0], plan.pairs[1]);
            const int j = std::max(plan.pairs[0], plan.pairs[1]);
            const Estimate est = estimate_current_correlation(
                table, i, j, spec.j_rung[static_cast<std::size_t>(i - 1)],
                spec.j_rung[static_cast<std::size_t>(j - 1)]);
            acc.report.g_matrix[{i, j}] = est.value / (jm * jm);
            acc.report.g_err[{i, j}] = est.stderr_ / (jm * jm);
            ++acc.g_measured;
            break;
        }
        case MeasurementPlan::Kind::bond_kinetic: {
            const int sign = calibrate_bond_sign(plan.delta);
            for (int p : plan.pairs) {
                const Estimate est = estimate_bond_kinetic(table, p, sign);
                acc.report.bond_o[static_cast<std::size_t>(p - 1)] = est.value;
                acc.report.bond_err[static_cast<std::size_t>(p - 1)] = est.stderr_;
                ++acc.bonds_measured;
            }
            break;
        }
    }
}

void finalize_estimates(EstimatorAccumulator& acc, const LatticeSpec& spec) {
    const int n_rungs = spec.n_sites - 1;
    // chiral order from whatever pairs were measured: per-distance average
    double c = 0.0, c_var = 0.0;
    for (int d = 2; d <= n_rungs - 1; ++d) {
        double sum = 0.0, var = 0.0;
        int count = 0;
        for (int j = 1; j + d <= n_rungs; ++j) {
            auto it = acc.report.g_matrix.find({j, j + d});
            if (it == acc.report.g_matrix.end()) continue;
            sum += it->second;
            const auto err_it = acc.report.g_err.find({j, j + d});
            if (err_it != acc.report.g_err.end()) var += err_it->second * err_it->second;
            ++count;
        }
        if (count > 0) {
            c += sum / count;
            c_var += var / (static_cast<double>(count) * count);
        }
    }
    acc.report.chiral_c = c;
    acc.report.chiral_c_err = std::sqrt(c_var);

    if (acc.bonds_measured == n_rungs) {
        double o = 0.0, var = 0.0;
        for (int j = 1; j <= n_rungs; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            o += sign * acc.report.bond_o[static_cast<std::size_t>(j - 1)];
            var += acc.report.bond_err[static_cast<std::size_t>(j - 1)] *
                   acc.report.bond_err[static_cast<std::size_t>(j - 1)];
        }
        acc.report.bond_order = o;
        acc.report.bond_order_err = std::sqrt(var);
    }
}

json point_to_json(const ExperimentConfig& cfg, const SweepPointResult& point) {
    json j;
    j["config_hash"] = cfg.hash;
    j["seed"] = cfg.seed;
    j["ratio"] = point.ratio;
    j["mode"] = cfg.mode == ExperimentConfig::Mode::ramp_prepared ? "ramp_prepared" : "exact_ground";
    j["plaquette_flux_over_pi"] = plaquette_flux_for_leg_phase(point.spec.flux) / M_PI;
    j["leg_phase_over_pi"] = point.spec.flux / M_PI;
    j["energy_rad_per_s"] = point.energy;
    j["degenerate"] = point.degenerate;
    if (point.ramp_fidelity) j["ramp_fidelity"] = *point.ramp_fidelity;
    if (point.ramp_fidelity_noisy) j["ramp_fidelity_noisy"] = *point.ramp_fidelity_noisy;
    j["exact"] = json::parse(report_json(point.exact));
    j["estimated"] = point.estimated ? json::parse(report_json(*point.estimated)) : json();
    return j;
}

void write_point_artifacts(const ExperimentConfig& cfg, const SweepPointResult& point,
                           std::vector<fs::path>& artifacts) {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const std::string tag = ratio_tag(point.ratio);

    const fs::path report_path = dir / ("report_" + tag + ".json");
    write_file(report_path.string(), point_to_json(cfg, point).dump(2) + "\n");
    artifacts.push_back(report_path);

    const std::string header = "# config_hash=" + cfg.hash + " ratio=" + fmt_double(point.ratio) +
                               " seed=" + std::to_string(cfg.seed) + "\n";
    const fs::path g_exact = dir / ("g_exact_" + tag + ".csv");
    write_file(g_exact.string(), header + g_matrix_csv(point.exact));
    artifacts.push_back(g_exact);
    if (point.estimated) {
        const fs::path g_shots = dir / ("g_shots_" + tag + ".csv");
        write_file(g_shots.string(), header + g_matrix_csv(*point.estimated));
        artifacts.push_back(g_shots);
    }
    for (const auto& table : point.tables) {
        std::string name = "shots_" + plan_kind_name(table.plan.kind);
        for (int p : table.plan.pairs) name += "_" + std::to_string(p);
        name += "_" + tag + ".csv";
        const fs::path path = dir / name;
        const std::string shot_header = "# config_hash=" + cfg.hash +
                                        " seed=" + std::to_string(table.seed) +
                                        " shots=" + std::to_string(table.total) + "\n";
        write_file(path.string(), shot_header + table.csv());
        artifacts.push_back(path);
    }
}

}  // namespace

SweepPointResult evaluate_ratio(const ExperimentConfig& cfg, double ratio,
                                std::size_t ratio_index) {
    SweepPointResult point;
    point.ratio = ratio;
    point.spec = cfg.spec_for_ratio(ratio);
    auto basis = build_basis(point.spec.n_sites, cfg.total_number, point.spec.n_max);

    StateVector prepared;
    std::optional<DensityMatrix> noisy_prepared;  // target frame, multi-sector
    if (cfg.mode == ExperimentConfig::Mode::ramp_prepared) {
        // Hardware frame: the attractive lattice whose top state maps onto
        // the target ground state through the staggered gauge.
        const LatticeSpec hw = negate_map(point.spec);
        const EigenPair target = top_state(hw, basis);
        const RampSchedule schedule = build_schedule(cfg);
        const RampResult ramped = evolve_ramp(schedule, hw, basis, &target.state);
        point.ramp_fidelity = ramped.fidelity;
        point.degenerate = target.degenerate;
        prepared = staggered_gauge_state(ramped.state);
        prepared.normalize();
        point.energy = real_expectation(assemble(point.spec, basis), prepared);
        if (cfg.noise) {
            auto multi =
                build_multi_sector_basis(point.spec.n_sites, cfg.total_number, point.spec.n_max);
            noisy_prepared = staggered_gauge_density(
                noisy_ramp_density(cfg, hw, schedule, multi));
            const StateVector target_t =
                embed_multi_sector(staggered_gauge_state(target.state), multi);
            point.ramp_fidelity_noisy =
                (target_t.amplitudes().adjoint() * noisy_prepared->matrix() *
                 target_t.amplitudes())(0)
                    .real();
        }
    } else {
        const EigenPair gs = ground_state(assemble(point.spec, basis));
        point.energy = gs.energy;
        point.degenerate = gs.degenerate;
        prepared = gs.state;
    }

    point.exact = exact_report(prepared, point.spec);

    if (!cfg.plans.empty()) {
        EstimatorAccumulator acc;
        acc.report.n_sites = point.spec.n_sites;
        acc.report.j_mean = point.spec.mean_rung();
        const int n_rungs = point.spec.n_sites - 1;
        acc.report.one_body = Eigen::MatrixXcd::Zero(point.spec.n_sites, point.spec.n_sites);
        acc.report.currents.assign(static_cast<std::size_t>(n_rungs), 0.0);
        acc.report.current_err.assign(static_cast<std::size_t>(n_rungs), 0.0);
        acc.report.bond_o.assign(static_cast<std::size_t>(n_rungs), 0.0);
        acc.report.bond_err.assign(static_cast<std::size_t>(n_rungs), 0.0);

        for (std::size_t pi = 0; pi < cfg.plans.size(); ++pi) {
            MeasurementPlan plan = cfg.plans[pi];
            if (plan.seed == 0)
                plan.seed = derive_seed(cfg.seed, ratio_index * 4096 + pi + 1);
            ShotTable table;
            if (noisy_prepared) {
                table = sample_noisy_density(*noisy_prepared, plan, point.spec, *cfg.noise,
                                             cfg.lindblad_rel_tol);
            } else if (cfg.noise) {
                table = sample_noisy(prepared, plan, point.spec, *cfg.noise,
                                     cfg.lindblad_rel_tol);
            } else {
                const StateVector post = apply_protocol(prepared, plan, point.spec);
                table = sample(post, plan);
            }
            apply_estimates(acc, plan, table, point.spec);
            point.tables.push_back(std::move(table));
        }
        finalize_estimates(acc, point.spec);
        point.estimated = std::move(acc.report);
    }
    return point;
}

std::string run_ground(const ExperimentConfig& cfg) {
    ExperimentConfig exact_cfg = cfg;
    exact_cfg.mode = ExperimentConfig::Mode::exact_ground;
    exact_cfg.plans.clear();
    const SweepPointResult point = evaluate_ratio(exact_cfg, cfg.base_ratio, 0);
    std::vector<fs::path> artifacts;
    write_point_artifacts(exact_cfg, point, artifacts);
    json out;
    out["config_hash"] = cfg.hash;
    out["ratio"] = point.ratio;
    out["energy_rad_per_s"] = point.energy;
    out["energy_over_j"] = point.energy / point.spec.mean_rung();
    out["degenerate"] = point.degenerate;
    out["chiral_c"] = point.exact.chiral_c;
    out["bond_order"] = point.exact.bond_order;
    json files = json::array();
    for (const auto& p : artifacts) files.push_back(p.string());
    out["files"] = files;
    return out.dump(2);
}

std::string run_ramp(const ExperimentConfig& cfg) {
    if (!cfg.ramp) throw_config("ramp: config has no 'ramp' block");
    ExperimentConfig ramp_cfg = cfg;
    ramp_cfg.mode = ExperimentConfig::Mode::ramp_prepared;
    ramp_cfg.plans.clear();
    const SweepPointResult point = evaluate_ratio(ramp_cfg, cfg.base_ratio, 0);
    std::vector<fs::path> artifacts;
    write_point_artifacts(ramp_cfg, point, artifacts);
    json out;
    out["config_hash"] = cfg.hash;
    out["ratio"] = point.ratio;
    out["ramp_fidelity"] = point.ramp_fidelity ? json(*point.ramp_fidelity) : json();
    out["energy_rad_per_s"] = point.energy;
    out["dt_ns"] = cfg.ramp->dt_s * 1e9;
    json files = json::array();
    for (const auto& p : artifacts) files.push_back(p.string());
    out["files"] = files;
    return out.dump(2);
}

std::string run_measure(const ExperimentConfig& cfg) {
    if (cfg.plans.empty()) throw_config("measure: config has no plans");
    const SweepPointResult point = evaluate_ratio(cfg, cfg.base_ratio, 0);
    std::vector<fs::path> artifacts;
    write_point_artifacts(cfg, point, artifacts);
    json out;
    out["config_hash"] = cfg.hash;
    out["ratio"] = point.ratio;
    out["plans"] = cfg.plans.size();
    if (point.estimated) {
        out["chiral_c_estimated"] = point.estimated->chiral_c;
        out["bond_order_estimated"] = point.estimated->bond_order;
    }
    json files = json::array();
    for (const auto& p : artifacts) files.push_back(p.string());
    out["files"] = files;
    return out.dump(2);
}

std::string run_sweep(const ExperimentConfig& cfg) {
    json out;
    out["config_hash"] = cfg.hash;
    if (cfg.sweep_ratios.empty()) {
        out["points"] = json::array();
        return out.dump(2);
    }

    std::vector<SweepPointResult> points(cfg.sweep_ratios.size());
    const auto evaluate_with_context = [&](std::size_t i) {
        try {
            points[i] = evaluate_ratio(cfg, cfg.sweep_ratios[i], i);
        } catch (const Error& e) {
            throw Error(e.code(), "sweep ratio " + fmt_double(cfg.sweep_ratios[i]) + ": " +
                                      e.what());
        }
    };
    const int workers = std::clamp<int>(cfg.threads, 1, static_cast<int>(cfg.sweep_ratios.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < cfg.sweep_ratios.size(); ++i) evaluate_with_context(i);
    } else {
        std::vector<std::future<void>> futures;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < workers; ++w)
            futures.push_back(std::async(std::launch::async, [&]() {
                for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
                    evaluate_with_context(i);
            }));
        for (auto& f : futures) f.get();
    }

    std::vector<fs::path> artifacts;
    for (const auto& point : points) write_point_artifacts(cfg, point, artifacts);

    // summary tables of the order parameters against the ratio
    json summary = json::array();
    std::ostringstream csv;
    csv << "# config_hash=" << cfg.hash << "\n";
    csv << "ratio,plaquette_flux_over_pi,energy_rad_per_s,chiral_c_exact,chiral_c_est,"
           "chiral_c_stderr,bond_order_exact,bond_order_est,bond_order_stderr\n";
    for (const auto& point : points) {
        json row;
        row["ratio"] = point.ratio;
        row["plaquette_flux_over_pi"] = plaquette_flux_for_leg_phase(point.spec.flux) / M_PI;
        row["energy_rad_per_s"] = point.energy;
        row["degenerate"] = point.degenerate;
        row["chiral_c_exact"] = point.exact.chiral_c;
        row["bond_order_exact"] = point.exact.bond_order;
        if (point.ramp_fidelity) row["ramp_fidelity"] = *point.ramp_fidelity;
        csv << fmt_double(point.ratio) << ','
            << fmt_double(plaquette_flux_for_leg_phase(point.spec.flux) / M_PI) << ','
            << fmt_double(point.energy) << ',' << fmt_double(point.exact.chiral_c) << ',';
        if (point.estimated) {
            row["chiral_c_estimated"] = point.estimated->chiral_c;
            row["chiral_c_stderr"] = point.estimated->chiral_c_err;
            row["bond_order_estimated"] = point.estimated->bond_order;
            row["bond_order_stderr"] = point.estimated->bond_order_err;
            csv << fmt_double(point.estimated->chiral_c) << ','
                << fmt_double(point.estimated->chiral_c_err) << ','
                << fmt_double(point.exact.bond_order) << ','
                << fmt_double(point.estimated->bond_order) << ','
                << fmt_double(point.estimated->bond_order_err) << '\n';
        } else {
            csv << ",," << fmt_double(point.exact.bond_order) << ",,\n";
        }
        summary.push_back(row);
    }
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    out["points"] = summary;
    const fs::path summary_json = dir / "summary.json";
    write_file(summary_json.string(), out.dump(2) + "\n");
    const fs::path summary_csv = dir / "summary.csv";
    write_file(summary_csv.string(), csv.str());
    json files = json::array();
    for (const auto& p : artifacts) files.push_back(p.string());
    files.push_back(summary_json.string());
    files.push_back(summary_csv.string());
    out["files"] = files;
    return out.dump(2);
}

namespace {

// ---- figures ----------------------------------------------------------

struct LoadedReport {
    double ratio = 0.0;
    std::string config_hash;
    ObservableReport exact;
    std::optional<ObservableReport> estimated;
};

double g_lookup(const ObservableReport& rep, int i, int j, bool* found) {
    auto it = rep.g_matrix.find({std::min(i, j), std::max(i, j)});
    if (it == rep.g_matrix.end()) {
        *found = false;
        return 0.0;
    }
    *found = true;
    return it->second;
}

std::string figure_heatmap(const LoadedReport& rep) {
    const int n_rungs = rep.exact.n_sites - 1;
    const double cell = 42.0, left = 70.0, top = 60.0;
    const double plot = cell * n_rungs;
    SvgCanvas svg(left + plot + 120.0, top + plot + 60.0);
    svg.comment("config_hash=" + rep.config_hash);
    char title[96];
    std::snprintf(title, sizeof(title),
                  "current correlations G(i,j)/J^2, ratio %.4g (lower: shots, upper: exact)",
                  rep.ratio);
    svg.text(left, 28.0, title, 13.0);

    double scale = 0.0;
    for (const auto& [key, v] : rep.exact.g_matrix) scale = std::max(scale, std::abs(v));
    if (rep.estimated)
        for (const auto& [key, v] : rep.estimated->g_matrix) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;

    for (int i = 1; i <= n_rungs; ++i) {
        for (int j = 1; j <= n_rungs; ++j) {
            const double x = left + (j - 1) * cell;
            const double y = top + (i - 1) * cell;
            std::string fill = "#d9d9d9";  // unmeasurable band
            if (std::abs(i - j) >= 2) {
                bool found = false;
                double v = 0.0;
                if (i > j) {  // lower triangle: shot estimates when present
                    v = rep.estimated ? g_lookup(*rep.estimated, i, j, &found) : 0.0;
                    if (!found) v = g_lookup(rep.exact, i, j, &found);
                } else {
                    v = g_lookup(rep.exact, i, j, &found);
                }
                if (found) fill = diverging_color(v, scale);
            }
            svg.rect(x, y, cell - 1.0, cell - 1.0, fill);
        }
        svg.text(left - 8.0, top + (i - 0.5) * cell + 4.0, std::to_string(i), 11.0, "end");
        svg.text(left + (i - 0.5) * cell, top + plot + 16.0, std::to_string(i), 11.0, "middle");
    }
    svg.text(left - 40.0, top + plot / 2.0, "rung i", 12.0, "middle");
    svg.text(left + plot / 2.0, top + plot + 38.0, "rung j", 12.0, "middle");

    // colorbar
    const double bar_x = left + plot + 24.0;
    const int steps = 40;
    for (int s = 0; s < steps; ++s) {
        const double v = scale * (1.0 - 2.0 * s / (steps - 1.0));
        svg.rect(bar_x, top + s * plot / steps, 16.0, plot / steps + 0.5, diverging_color(v, scale));
    }
    svg.text(bar_x + 22.0, top + 10.0, "+" + fmt_double(scale), 10.0);
    svg.text(bar_x + 22.0, top + plot, "-" + fmt_double(scale), 10.0);
    return svg.finish();
}

std::string figure_distance(const LoadedReport& rep) {
    const int n_rungs = rep.exact.n_sites - 1;
    const double width = 520.0, height = 360.0, left = 70.0, top = 50.0;
    const double pw = width - left - 40.0, ph = height - top - 60.0;
    SvgCanvas svg(width, height);
    svg.comment("config_hash=" + rep.config_hash);
    char title[96];
    std::snprintf(title, sizeof(title), "G vs rung distance, ratio %.4g", rep.ratio);
    svg.text(left, 26.0, title, 13.0);

    double vmax = 0.0;
    for (const auto& [key, v] : rep.exact.g_matrix) vmax = std::max(vmax, std::abs(v));
    if (rep.estimated)
        for (const auto& [key, v] : rep.estimated->g_matrix) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) vmax = 1.0;
    const int d_min = 2, d_max = std::max(2, n_rungs - 1);
    const auto x_of = [&](double d) {
        return left + pw * (d - d_min + 0.5) / (d_max - d_min + 1.0);
    };
    const auto y_of = [&](double v) { return top + ph * 0.5 * (1.0 - v / vmax); };

    svg.line(left, y_of(0.0), left + pw, y_of(0.0), "#888888", 1.0, true);
    svg.line(left, top, left, top + ph, "#000000");
    svg.line(left, top + ph, left + pw, top + ph, "#000000");
    svg.text(18.0, top + ph / 2.0, "G/J^2", 12.0);
    svg.text(left + pw / 2.0, height - 14.0, "distance |i-j|", 12.0, "middle");

    for (int d = d_min; d <= d_max; ++d) {
        svg.text(x_of(d), top + ph + 18.0, std::to_string(d), 11.0, "middle");
        double mean = 0.0;
        int count = 0;
        for (int j = 1; j + d <= n_rungs; ++j) {
            bool found = false;
            const double v = g_lookup(rep.exact, j, j + d, &found);
            if (!found) continue;
            svg.circle(x_of(d) - 6.0, y_of(v), 3.5, "#333333");
            mean += v;
            ++count;
            if (rep.estimated) {
                bool est_found = false;
                const double ve = g_lookup(*rep.estimated, j, j + d, &est_found);
                if (est_found) svg.circle(x_of(d) + 6.0, y_of(ve), 3.5, "#d62728");
            }
        }
        if (count > 0) {
            const double m = mean / count;
            svg.line(x_of(d) - 12.0, y_of(m), x_of(d) + 12.0, y_of(m), "#1f77b4", 2.0);
        }
    }
    svg.circle(left + pw - 120.0, top + 8.0, 3.5, "#333333");
    svg.text(left + pw - 110.0, top + 12.0, "exact", 10.0);
    svg.circle(left + pw - 60.0, top + 8.0, 3.5, "#d62728");
    svg.text(left + pw - 50.0, top + 12.0, "shots", 10.0);
    return svg.finish();
}

std::string figure_bonds(const LoadedReport& rep) {
    const int n_rungs = rep.exact.n_sites - 1;
    const double width = 520.0, height = 340.0, left = 70.0, top = 50.0;
    const double pw = width - left - 40.0, ph = height - top - 60.0;
    SvgCanvas svg(width, height);
    svg.comment("config_hash=" + rep.config_hash);
    char title[96];
    std::snprintf(title, sizeof(title), "bond kinetic energies O_j, ratio %.4g", rep.ratio);
    svg.text(left, 26.0, title, 13.0);

    double vmax = 0.0;
    for (double v : rep.exact.bond_o) vmax = std::max(vmax, std::abs(v));
    if (rep.estimated)
        for (double v : rep.estimated->bond_o) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) vmax = 1.0;
    const double y0 = top + ph / 2.0;
    const auto y_of = [&](double v) { return y0 - 0.5 * ph * (v / vmax); };
    const double slot = pw / n_rungs;

    svg.line(left, y0, left + pw, y0, "#888888", 1.0, true);
    for (int j = 1; j <= n_rungs; ++j) {
        const double v = rep.exact.bond_o[static_cast<std::size_t>(j - 1)];
        const double x = left + (j - 1) * slot + slot * 0.2;
        const double y = y_of(std::max(v, 0.0));
        svg.rect(x, y, slot * 0.45, std::abs(y_of(v) - y0), v >= 0.0 ? "#1f77b4" : "#ff7f0e");
        if (rep.estimated) {
            const double ve = rep.estimated->bond_o[static_cast<std::size_t>(j - 1)];
            svg.circle(x + slot * 0.55, y_of(ve), 4.0, "#d62728");
            if (!rep.estimated->bond_err.empty()) {
                const double err = rep.estimated->bond_err[static_cast<std::size_t>(j - 1)];
                svg.line(x + slot * 0.55, y_of(ve - err), x + slot * 0.55, y_of(ve + err),
                         "#d62728", 1.5);
            }
        }
        svg.text(left + (j - 0.5) * slot, top + ph + 18.0, std::to_string(j), 11.0, "middle");
    }
    svg.text(left + pw / 2.0, height - 14.0, "rung j", 12.0, "middle");
    svg.text(18.0, top + ph / 2.0, "O_j", 12.0);
    return svg.finish();
}

}  // namespace

std::string run_figures(const ExperimentConfig& cfg, const std::string& reports_dir) {
    const fs::path dir = reports_dir.empty() ? fs::path(cfg.output_dir) : fs::path(reports_dir);
    if (!fs::exists(dir)) throw_io("figures: reports directory does not exist: " + dir.string());

    std::vector<fs::path> report_files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("report_", 0) == 0 && entry.path().extension() == ".json")
            report_files.push_back(entry.path());
    }
    std::sort(report_files.begin(), report_files.end());
    if (report_files.empty()) throw_io("figures: no report_*.json files in " + dir.string());

    const fs::path out_dir(cfg.output_dir);
    fs::create_directories(out_dir);
    json files = json::array();
    for (const auto& path : report_files) {
        json j = json::parse(read_file(path.string()));
        LoadedReport rep;
        rep.ratio = j.at("ratio").get<double>();
        rep.config_hash = j.value("config_hash", cfg.hash);
        rep.exact = report_from_json(j.at("exact").dump());
        if (j.contains("estimated") && !j.at("estimated").is_null())
            rep.estimated = report_from_json(j.at("estimated").dump());

        const std::string tag = ratio_tag(rep.ratio);
        const std::array<std::pair<std::string, std::string>, 3> outputs = {
            std::make_pair("g_heatmap_" + tag + ".svg", figure_heatmap(rep)),
            std::make_pair("g_vs_distance_" + tag + ".svg", figure_distance(rep)),
            std::make_pair("bonds_" + tag + ".svg", figure_bonds(rep)),
        };
        for (const auto& [name, body] : outputs) {
            const fs::path out = out_dir / name;
            write_file(out.string(), body);
            files.push_back(out.string());
        }
    }
    json out;
    out["config_hash"] = cfg.hash;
    out["files"] = files;
    return out.dump(2);
}

std::string verify_report_json(const std::vector<CheckResult>& checks) {
    json out;
    json list = json::array();
    int failed = 0;
    for (const auto& c : checks) {
        json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["detail"] = c.detail;
        list.push_back(e);
        if (!c.pass) ++failed;
    }
    out["checks"] = list;
    out["n_checks"] = checks.size();
    out["n_failed"] = failed;
    return out.dump(2);
}

}  // namespace fluxladder
