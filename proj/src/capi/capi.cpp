#include "fluxladder_c.h"

#include <cstring>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fluxladder/errors.hpp"
#include "fluxladder/runner.hpp"
#include "fluxladder/version.hpp"

using namespace fluxladder;

namespace {

thread_local std::string g_last_error = "no error";

fl_status status_from(const Error& e) {
    switch (e.code()) {
        case ErrorCode::invalid_argument: return FL_ERR_INVALID_ARGUMENT;
        case ErrorCode::dimension_mismatch: return FL_ERR_DIMENSION_MISMATCH;
        case ErrorCode::non_measurable_pair: return FL_ERR_NON_MEASURABLE_PAIR;
        case ErrorCode::config: return FL_ERR_CONFIG;
        case ErrorCode::io: return FL_ERR_IO;
        case ErrorCode::numeric: return FL_ERR_NUMERIC;
    }
    return FL_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs fn inside the exception->status firewall.
template <typename Fn>
fl_status guarded(Fn&& fn) {
    try {
        fn();
        return FL_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_from(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FL_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return FL_ERR_INTERNAL;
    }
}

}  // namespace

struct fl_config {
    ExperimentConfig cfg;
};

struct fl_lattice {
    LatticeSpec spec;
    int total = 0;
    std::shared_ptr<const FockBasis> basis;
};

struct fl_state {
    StateVector state;
    double energy = 0.0;
    bool degenerate = false;
};

extern "C" {

const char* fl_version(void) { return version_string; }

const char* fl_last_error(void) { return g_last_error.c_str(); }

void fl_string_free(char* s) { delete[] s; }

fl_status fl_config_load(const char* path, fl_config** out) {
    if (!path || !out) {
        g_last_error = "null argument";
        return FL_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] { *out = new fl_config{load_config(path)}; });
}

fl_status fl_config_parse(const char* json_text, fl_config** out) {
    if (!json_text || !out) {
        g_last_error = "null argument";
        return FL_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] { *out = new fl_config{parse_config(json_text)}; });
}

fl_status fl_config_default(fl_config** out) {
    if (!out) {
        g_last_error = "null argument";
        return FL_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] { *out = new fl_config{default_config()}; });
}

fl_status fl_config_set_seed(fl_config* cfg, uint64_t seed) {
    if (!cfg) {
        g_last_error = "null config handle";
        return FL_ERR_BAD_HANDLE;
    }
    cfg->cfg.seed = seed;
    return FL_OK;
}

fl_status fl_config_set_shots(fl_config* cfg, uint64_t shots) {
    if (!cfg) {
        g_last_error = "null config handle";
        return FL_ERR_BAD_HANDLE;
    }
    if (shots < 1) {
        g_last_error = "shots must be >= 1";
        return FL_ERR_INVALID_ARGUMENT;
    }
    cfg->cfg.default_shots = shots;
    for (auto& plan : cfg->cfg.plans) plan.shots = shots;
    return FL_OK;
}

fl_status fl_config_set_threads(fl_config* cfg, int threads) {
    if (!cfg) {
        g_last_error = "null config handle";
        return FL_ERR_BAD_HANDLE;
    }
    if (threads < 1 || threads > 256) {
        g_last_error = "threads must be in [1, 256]";
        return FL_ERR_INVALID_ARGUMENT;
    }
    cfg->cfg.threads = threads;
    return FL_OK;
}

fl_status fl_config_set_output_dir(fl_config* cfg, const char* dir) {
    if (!cfg) {
        g_last_error = "null config handle";
        return FL_ERR_BAD_HANDLE;
    }
    if (!dir) {
        g_last_error = "null output dir";
        return FL_ERR_INVALID_ARGUMENT;
    }
    cfg->cfg.output_dir = dir;
    return FL_OK;
}

fl_status fl_config_hash(const fl_config* cfg, char** hex_out) {
    if (!cfg || !hex_out) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    *hex_out = dup_string(cfg->cfg.hash);
    return FL_OK;
}

void fl_config_free(fl_config* cfg) { delete cfg; }

fl_status fl_run_ground(const fl_config* cfg, char** summary_json) {
    if (!cfg || !summary_json) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] { *summary_json = dup_string(run_ground(cfg->cfg)); });
}

fl_status fl_run_ramp(const fl_config* cfg, char** summary_json) {
    if (!cfg || !summary_json) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] { *summary_json = dup_string(run_ramp(cfg->cfg)); });
}

fl_status fl_run_measure(const fl_config* cfg, char** summary_json) {
    if (!cfg || !summary_json) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] { *summary_json = dup_string(run_measure(cfg->cfg)); });
}

fl_status fl_run_sweep(const fl_config* cfg, char** summary_json) {
    if (!cfg || !summary_json) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] { *summary_json = dup_string(run_sweep(cfg->cfg)); });
}

fl_status fl_run_figures(const fl_config* cfg, const char* reports_dir, char** summary_json) {
    if (!cfg || !summary_json) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] {
        *summary_json =
            dup_string(run_figures(cfg->cfg, reports_dir ? reports_dir : std::string()));
    });
}

fl_status fl_run_verify(const fl_config* cfg, char** report_json, int* n_failed) {
    if (!report_json || !n_failed) {
        g_last_error = "null argument";
        return FL_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const auto checks = run_verify(cfg ? &cfg->cfg : nullptr);
        *report_json = dup_string(verify_report_json(checks));
        int failed = 0;
        for (const auto& c : checks)
            if (!c.pass) ++failed;
        *n_failed = failed;
    });
}

fl_status fl_run_verify_file(const char* config_path, char** report_json, int* n_failed) {
    if (!config_path || !report_json || !n_failed) {
        g_last_error = "null argument";
        return FL_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const auto checks = run_verify_file(config_path);
        *report_json = dup_string(verify_report_json(checks));
        int failed = 0;
        for (const auto& c : checks)
            if (!c.pass) ++failed;
        *n_failed = failed;
    });
}

fl_status fl_lattice_create(int n_sites, int total, int n_max, const double* omega,
                            const double* u, const double* j_rung, const double* j_leg,
                            double flux, fl_lattice** out) {
    if (!out || !omega || !u || !j_rung || (n_sites > 2 && !j_leg)) {
        g_last_error = "null argument";
        return FL_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        LatticeSpec spec;
        spec.n_sites = n_sites;
        spec.n_max = n_max;
        spec.flux = flux;
        spec.omega.assign(omega, omega + n_sites);
        spec.u.assign(u, u + n_sites);
        spec.j_rung.assign(j_rung, j_rung + n_sites - 1);
        if (n_sites > 2) spec.j_leg.assign(j_leg, j_leg + n_sites - 2);
        spec.validate();
        auto lat = std::make_unique<fl_lattice>();
        lat->spec = std::move(spec);
        lat->total = total;
        lat->basis = build_basis(n_sites, total, n_max);
        *out = lat.release();
    });
}

void fl_lattice_free(fl_lattice* lat) { delete lat; }

fl_status fl_lattice_dim(const fl_lattice* lat, uint64_t* dim_out) {
    if (!lat || !dim_out) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    *dim_out = lat->basis->dim();
    return FL_OK;
}

fl_status fl_lattice_hamiltonian_triplets(const fl_lattice* lat, char** text_out) {
    if (!lat || !text_out) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] {
        std::ostringstream os;
        assemble(lat->spec, lat->basis).write_triplets(os);
        *text_out = dup_string(os.str());
    });
}

fl_status fl_ground_state(const fl_lattice* lat, fl_state** out, double* energy_out) {
    if (!lat || !out) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] {
        const EigenPair gs = ground_state(assemble(lat->spec, lat->basis));
        auto st = std::make_unique<fl_state>();
        st->state = gs.state;
        st->energy = gs.energy;
        st->degenerate = gs.degenerate;
        if (energy_out) *energy_out = gs.energy;
        *out = st.release();
    });
}

fl_status fl_top_state(const fl_lattice* lat, fl_state** out, double* energy_out) {
    if (!lat || !out) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] {
        const EigenPair top = top_state(lat->spec, lat->basis);
        auto st = std::make_unique<fl_state>();
        st->state = top.state;
        st->energy = top.energy;
        st->degenerate = top.degenerate;
        if (energy_out) *energy_out = top.energy;
        *out = st.release();
    });
}

void fl_state_free(fl_state* st) { delete st; }

fl_status fl_state_observables_json(const fl_lattice* lat, const fl_state* st, char** json_out) {
    if (!lat || !st || !json_out) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] { *json_out = dup_string(report_json(exact_report(st->state, lat->spec))); });
}

fl_status fl_state_current(const fl_lattice* lat, const fl_state* st, int rung, double* out) {
    if (!lat || !st || !out) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] { *out = rung_current(st->state, rung, lat->spec); });
}

fl_status fl_state_current_correlation(const fl_lattice* lat, const fl_state* st, int rung_i,
                                       int rung_j, double* out) {
    if (!lat || !st || !out) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] { *out = current_correlation(st->state, rung_i, rung_j, lat->spec); });
}

fl_status fl_sample_csv(const fl_lattice* lat, const fl_state* st, const char* plan_json,
                        char** csv_out) {
    if (!lat || !st || !plan_json || !csv_out) {
        g_last_error = "null argument";
        return FL_ERR_BAD_HANDLE;
    }
    return guarded([&] {
        // parse the single plan through the config machinery so the accepted
        // schema stays in one place
        const nlohmann::json plan_parsed = nlohmann::json::parse(plan_json);
        if (!plan_parsed.contains("pairs") || plan_parsed.at("pairs").empty())
            throw_config("fl_sample_csv: plan must name explicit pairs");
        nlohmann::json cfg_json;
        cfg_json["version"] = 1;
        cfg_json["lattice"]["n_sites"] = lat->spec.n_sites;
        cfg_json["lattice"]["n_max"] = lat->spec.n_max;
        cfg_json["lattice"]["leg_ratio"] = 1.0;
        cfg_json["total_number"] = lat->total;
        cfg_json["plans"] = nlohmann::json::array({plan_parsed});
        const ExperimentConfig tmp = parse_config(cfg_json.dump());
        if (tmp.plans.empty()) throw_config("fl_sample_csv: plan expanded to nothing");
        MeasurementPlan plan = tmp.plans.front();
        if (plan.seed == 0) plan.seed = 1;
        const StateVector post = apply_protocol(st->state, plan, lat->spec);
        *csv_out = dup_string(sample(post, plan).csv());
    });
}

}  // extern "C"
