#include "fluxladder/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "fluxladder/errors.hpp"
#include "fluxladder/util.hpp"

namespace fluxladder {

using nlohmann::json;

namespace {

constexpr double mhz_to_rad = 2.0 * M_PI * 1e6;  // value/2pi in MHz -> rad/s
constexpr double ns_to_s = 1e-9;
constexpr double us_to_s = 1e-6;

void require_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw_config("config: " + where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.contains(it.key()))
            throw_config("config: unknown key '" + it.key() + "' in " + where);
}

double number_at(const json& j, const std::string& key) {
    if (!j.contains(key)) throw_config("config: missing key '" + key + "'");
    if (!j.at(key).is_number()) throw_config("config: '" + key + "' must be a number");
    return j.at(key).get<double>();
}

// Scalar broadcast or per-entry list.
std::vector<double> number_list(const json& j, const std::string& key, std::size_t n,
                                double fallback) {
    if (!j.contains(key)) return std::vector<double>(n, fallback);
    const auto& v = j.at(key);
    if (v.is_number()) return std::vector<double>(n, v.get<double>());
    if (v.is_array()) {
        if (v.size() != n)
            throw_config("config: '" + key + "' must have " + std::to_string(n) + " entries");
        std::vector<double> out;
        out.reserve(n);
        for (const auto& e : v) {
            if (!e.is_number()) throw_config("config: '" + key + "' entries must be numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    throw_config("config: '" + key + "' must be a number or list");
}

MeasurementPlan::Kind plan_kind(const std::string& s) {
    if (s == "current") return MeasurementPlan::Kind::current;
    if (s == "current_correlation") return MeasurementPlan::Kind::current_correlation;
    if (s == "bond_kinetic") return MeasurementPlan::Kind::bond_kinetic;
    throw_config("config: unknown plan kind '" + s + "'");
}

std::string plan_kind_name(MeasurementPlan::Kind k) {
    switch (k) {
        case MeasurementPlan::Kind::current: return "current";
        case MeasurementPlan::Kind::current_correlation: return "current_correlation";
        case MeasurementPlan::Kind::bond_kinetic: return "bond_kinetic";
    }
    return "current";
}

RampSegment::Shape shape_from(const std::string& s) {
    if (s == "step") return RampSegment::Shape::step;
    if (s == "linear") return RampSegment::Shape::linear;
    if (s == "cosine") return RampSegment::Shape::cosine;
    throw_config("config: unknown ramp shape '" + s + "'");
}

// Expands a plan template into concrete plans: empty pairs mean "all rungs"
// (per-rung plans) or "all measurable pairs" for correlations.
void expand_plan(const json& p, std::uint64_t default_shots, int n_sites,
                 std::vector<MeasurementPlan>& out) {
    require_keys(p, "plans[]",
                 {"kind", "pairs", "shots", "seed", "readout", "t_bs_ns", "t_idle_ns",
                  "delta_mhz"});
    if (!p.contains("kind") || !p.at("kind").is_string())
        throw_config("config: plan needs a string 'kind'");
    MeasurementPlan proto;
    proto.kind = plan_kind(p.at("kind").get<std::string>());
    proto.shots = p.contains("shots") ? p.at("shots").get<std::uint64_t>() : default_shots;
    proto.seed = p.contains("seed") ? p.at("seed").get<std::uint64_t>() : 0;  // 0 = derive
    if (p.contains("readout")) {
        const auto r = p.at("readout").get<std::string>();
        if (r == "occupancy")
            proto.readout = MeasurementPlan::Readout::occupancy;
        else if (r == "binary")
            proto.readout = MeasurementPlan::Readout::binary;
        else
            throw_config("config: readout must be 'occupancy' or 'binary'");
    }
    if (p.contains("t_bs_ns")) {
        const auto& t = p.at("t_bs_ns");
        if (t.is_number())
            proto.t_bs = {t.get<double>() * ns_to_s};
        else
            for (const auto& e : t) proto.t_bs.push_back(e.get<double>() * ns_to_s);
    }
    if (p.contains("t_idle_ns")) proto.t_idle = p.at("t_idle_ns").get<double>() * ns_to_s;
    if (p.contains("delta_mhz")) proto.delta = p.at("delta_mhz").get<double>() * mhz_to_rad;
    if (proto.kind == MeasurementPlan::Kind::bond_kinetic && proto.delta == 0.0)
        proto.delta = 10.0 * mhz_to_rad;  // any isolated-pair detuning works; sign calibrated

    std::vector<int> pairs;
    if (p.contains("pairs")) {
        if (!p.at("pairs").is_array()) throw_config("config: 'pairs' must be a list");
        for (const auto& e : p.at("pairs")) pairs.push_back(e.get<int>());
    }

    const int n_rungs = n_sites - 1;
    if (!pairs.empty()) {
        proto.pairs = pairs;
        // fan a single t_bs value out to all pairs
        if (proto.t_bs.size() == 1 && proto.pairs.size() > 1)
            proto.t_bs.assign(proto.pairs.size(), proto.t_bs[0]);
        out.push_back(proto);
        return;
    }
    if (proto.kind == MeasurementPlan::Kind::current_correlation) {
        for (int i = 1; i <= n_rungs; ++i)
            for (int j = i + 2; j <= n_rungs; ++j) {
                MeasurementPlan plan = proto;
                plan.pairs = {i, j};
                if (plan.t_bs.size() == 1) plan.t_bs.assign(2, plan.t_bs[0]);
                out.push_back(plan);
            }
    } else {
        for (int j = 1; j <= n_rungs; ++j) {
            MeasurementPlan plan = proto;
            plan.pairs = {j};
            out.push_back(plan);
        }
    }
}

json plan_to_json(const MeasurementPlan& plan) {
    json p;
    p["kind"] = plan_kind_name(plan.kind);
    p["pairs"] = plan.pairs;
    p["shots"] = plan.shots;
    p["seed"] = plan.seed;
    p["readout"] = plan.readout == MeasurementPlan::Readout::binary ? "binary" : "occupancy";
    json t = json::array();
    for (double v : plan.t_bs) t.push_back(v / ns_to_s);
    p["t_bs_ns"] = t;
    p["t_idle_ns"] = plan.t_idle / ns_to_s;
    p["delta_mhz"] = plan.delta / mhz_to_rad;
    return p;
}

}  // namespace

LatticeSpec ExperimentConfig::spec_for_ratio(double ratio) const {
    if (ratio == 0.0 || !std::isfinite(ratio))
        throw_config("config: sweep ratios must be finite and nonzero");
    LatticeSpec spec = lattice;
    const double j_mean = lattice.mean_rung();
    spec.j_leg.assign(static_cast<std::size_t>(spec.n_sites - 2), std::abs(ratio) * j_mean);
    const double plaquette = flux_override ? *flux_override : (ratio < 0.0 ? M_PI : 0.0);
    spec.flux = leg_phase_for_plaquette_flux(plaquette);
    spec.validate();
    return spec;
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw_config(std::string("config: invalid JSON: ") + e.what());
    }
    require_keys(j, "top level",
                 {"version", "lattice", "total_number", "mode", "sweep", "ramp", "plans", "noise",
                  "lindblad_rel_tol", "output_dir", "seed", "shots", "threads"});
    if (!j.contains("version")) throw_config("config: missing schema 'version'");
    const int version = j.at("version").get<int>();
    if (version != 1) throw_config("config: unsupported schema version (expected 1)");

    ExperimentConfig cfg;
    cfg.schema_version = version;

    if (!j.contains("lattice")) throw_config("config: missing 'lattice' block");
    const json& lat = j.at("lattice");
    require_keys(lat, "lattice",
                 {"n_sites", "n_max", "j_rung_mhz", "leg_ratio", "u_mhz", "omega_mhz",
                  "plaquette_flux_over_pi"});
    const int n_sites = static_cast<int>(number_at(lat, "n_sites"));
    if (n_sites < 2 || n_sites > 24) throw_config("config: n_sites must be in [2, 24]");
    const int n_max = lat.contains("n_max") ? lat.at("n_max").get<int>() : 1;
    const double base_ratio = number_at(lat, "leg_ratio");
    if (base_ratio == 0.0) throw_config("config: leg_ratio must be nonzero");

    cfg.base_ratio = base_ratio;
    cfg.lattice.n_sites = n_sites;
    cfg.lattice.n_max = n_max;
    cfg.lattice.omega = number_list(lat, "omega_mhz", static_cast<std::size_t>(n_sites), 0.0);
    cfg.lattice.u = number_list(lat, "u_mhz", static_cast<std::size_t>(n_sites), 0.0);
    for (double& v : cfg.lattice.omega) v *= mhz_to_rad;
    for (double& v : cfg.lattice.u) v *= mhz_to_rad;
    cfg.lattice.j_rung =
        number_list(lat, "j_rung_mhz", static_cast<std::size_t>(n_sites - 1), 6.1);
    for (double& v : cfg.lattice.j_rung) v *= mhz_to_rad;
    if (lat.contains("plaquette_flux_over_pi"))
        cfg.flux_override = number_at(lat, "plaquette_flux_over_pi") * M_PI;
    cfg.lattice.j_leg.assign(static_cast<std::size_t>(n_sites - 2),
                             std::abs(base_ratio) * cfg.lattice.mean_rung());
    cfg.lattice.flux = leg_phase_for_plaquette_flux(
        cfg.flux_override ? *cfg.flux_override : (base_ratio < 0.0 ? M_PI : 0.0));
    cfg.lattice.validate();

    if (!j.contains("total_number")) throw_config("config: missing 'total_number'");
    cfg.total_number = j.at("total_number").get<int>();
    if (cfg.total_number < 0 || cfg.total_number > n_sites * n_max)
        throw_config("config: total_number outside [0, n_sites*n_max]");

    const std::string mode = j.value("mode", std::string("exact_ground"));
    if (mode == "exact_ground")
        cfg.mode = ExperimentConfig::Mode::exact_ground;
    else if (mode == "ramp_prepared")
        cfg.mode = ExperimentConfig::Mode::ramp_prepared;
    else
        throw_config("config: mode must be 'exact_ground' or 'ramp_prepared'");

    if (j.contains("sweep")) {
        require_keys(j.at("sweep"), "sweep", {"ratios"});
        cfg.sweep_ratios = j.at("sweep").at("ratios").get<std::vector<double>>();
        if (cfg.sweep_ratios.empty() && j.at("sweep").at("ratios").is_array()) {
            // an explicitly empty sweep is allowed: no points, success
        }
        for (double r : cfg.sweep_ratios)
            if (r == 0.0 || !std::isfinite(r))
                throw_config("config: sweep ratios must be finite and nonzero");
    } else {
        cfg.sweep_ratios = {base_ratio};
    }

    if (j.contains("ramp")) {
        const json& ramp = j.at("ramp");
        require_keys(ramp, "ramp",
                     {"excited_sites", "park_detuning_mhz", "duration_ns", "shape", "dt_ns"});
        ExperimentConfig::RampConfig rc;
        rc.excited_sites = ramp.at("excited_sites").get<std::vector<int>>();
        for (int s : rc.excited_sites)
            if (s < 1 || s > n_sites) throw_config("config: excited site out of range");
        if (static_cast<int>(rc.excited_sites.size()) != cfg.total_number)
            throw_config("config: excited_sites count must equal total_number");
        rc.park_detuning = number_at(ramp, "park_detuning_mhz") * mhz_to_rad;
        rc.duration_s = number_at(ramp, "duration_ns") * ns_to_s;
        if (!(rc.duration_s >= 0.0)) throw_config("config: ramp duration must be >= 0");
        rc.shape = shape_from(ramp.value("shape", std::string("linear")));
        rc.dt_s = ramp.value("dt_ns", 0.1) * ns_to_s;
        if (!(rc.dt_s > 0.0)) throw_config("config: ramp dt must be > 0");
        cfg.ramp = rc;
    }
    if (cfg.mode == ExperimentConfig::Mode::ramp_prepared && !cfg.ramp)
        throw_config("config: ramp_prepared mode needs a 'ramp' block");

    cfg.default_shots = j.value("shots", std::uint64_t{100000});
    if (cfg.default_shots < 1) throw_config("config: shots must be >= 1");

    if (j.contains("plans")) {
        if (!j.at("plans").is_array()) throw_config("config: 'plans' must be a list");
        for (const auto& p : j.at("plans")) expand_plan(p, cfg.default_shots, n_sites, cfg.plans);
        for (const auto& plan : cfg.plans) plan.validate(n_sites);
    }

    if (j.contains("noise")) {
        const json& noise = j.at("noise");
        require_keys(noise, "noise", {"t1_us", "t2r_us", "t1_s", "t2r_s"});
        const bool in_seconds = noise.contains("t1_s") || noise.contains("t2r_s");
        if (in_seconds && (noise.contains("t1_us") || noise.contains("t2r_us")))
            throw_config("config: give noise times in seconds or microseconds, not both");
        NoiseModel model;
        const auto n = static_cast<std::size_t>(n_sites);
        if (in_seconds) {
            model.t1 = number_list(noise, "t1_s", n, 0.0);
            model.t2r = number_list(noise, "t2r_s", n, 0.0);
        } else {
            model.t1 = number_list(noise, "t1_us", n, 0.0);
            model.t2r = number_list(noise, "t2r_us", n, 0.0);
            for (double& v : model.t1) v *= us_to_s;
            for (double& v : model.t2r) v *= us_to_s;
        }
        model.validate(n_sites);
        cfg.noise = model;
    }
    cfg.lindblad_rel_tol = j.value("lindblad_rel_tol", 1e-8);

    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.threads = j.value("threads", 1);
    if (cfg.threads < 1 || cfg.threads > 256) throw_config("config: threads must be in [1, 256]");

    // Canonical form: every default made explicit, keys sorted by nlohmann's
    // ordered map, so the hash is stable against formatting.
    json canon;
    canon["version"] = 1;
    canon["lattice"]["n_sites"] = n_sites;
    canon["lattice"]["n_max"] = n_max;
    canon["lattice"]["leg_ratio"] = base_ratio;
    json jr = json::array();
    for (double v : cfg.lattice.j_rung) jr.push_back(v / mhz_to_rad);
    canon["lattice"]["j_rung_mhz"] = jr;
    json om = json::array(), uu = json::array();
    for (double v : cfg.lattice.omega) om.push_back(v / mhz_to_rad);
    for (double v : cfg.lattice.u) uu.push_back(v / mhz_to_rad);
    canon["lattice"]["omega_mhz"] = om;
    canon["lattice"]["u_mhz"] = uu;
    if (cfg.flux_override) canon["lattice"]["plaquette_flux_over_pi"] = *cfg.flux_override / M_PI;
    canon["total_number"] = cfg.total_number;
    canon["mode"] = mode;
    canon["sweep"]["ratios"] = cfg.sweep_ratios;
    if (cfg.ramp) {
        canon["ramp"]["excited_sites"] = cfg.ramp->excited_sites;
        canon["ramp"]["park_detuning_mhz"] = cfg.ramp->park_detuning / mhz_to_rad;
        canon["ramp"]["duration_ns"] = cfg.ramp->duration_s / ns_to_s;
        canon["ramp"]["shape"] = cfg.ramp->shape == RampSegment::Shape::step     ? "step"
                                 : cfg.ramp->shape == RampSegment::Shape::cosine ? "cosine"
                                                                                 : "linear";
        canon["ramp"]["dt_ns"] = cfg.ramp->dt_s / ns_to_s;
    }
    json plans = json::array();
    for (const auto& plan : cfg.plans) plans.push_back(plan_to_json(plan));
    canon["plans"] = plans;
    if (cfg.noise) {
        json t1 = json::array(), t2r = json::array();
        for (double v : cfg.noise->t1) t1.push_back(v / us_to_s);
        for (double v : cfg.noise->t2r) t2r.push_back(v / us_to_s);
        canon["noise"]["t1_us"] = t1;
        canon["noise"]["t2r_us"] = t2r;
        canon["lindblad_rel_tol"] = cfg.lindblad_rel_tol;
    }
    canon["output_dir"] = cfg.output_dir;
    canon["seed"] = cfg.seed;
    canon["shots"] = cfg.default_shots;
    canon["threads"] = cfg.threads;
    cfg.canonical_json = canon.dump();
    cfg.hash = hex64(fnv1a64(cfg.canonical_json));
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_file(path));
}

std::string default_config_json() {
    json j;
    j["version"] = 1;
    j["lattice"]["n_sites"] = 8;
    j["lattice"]["n_max"] = 1;
    j["lattice"]["j_rung_mhz"] = 6.1;
    j["lattice"]["leg_ratio"] = -1.22;
    j["total_number"] = 4;
    j["mode"] = "exact_ground";
    j["sweep"]["ratios"] = {-3.56, -2.02, -1.22, 0.98, 1.96, 3.53};
    j["plans"] = json::array(
        {{{"kind", "current"}, {"pairs", json::array()}},
         {{"kind", "current_correlation"}, {"pairs", json::array()}},
         {{"kind", "bond_kinetic"}, {"pairs", json::array()}, {"delta_mhz", 61.0}}});
    j["output_dir"] = "out";
    j["seed"] = 20260808;
    j["shots"] = 100000;
    j["threads"] = 1;
    return j.dump(2);
}

ExperimentConfig default_config() {
    return parse_config(default_config_json());
}

}  // namespace fluxladder
