// fluxladder command line: drives the shared library through its C API.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fluxladder_c.h"

namespace {

struct ConfigDeleter {
    void operator()(fl_config* c) const { fl_config_free(c); }
};
using ConfigPtr = std::unique_ptr<fl_config, ConfigDeleter>;

struct CommonOpts {
    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    auto* c = cmd->add_option("-c,--config", opts.config_path, "experiment config JSON");
    if (config_required) c->required();
    cmd->add_option("-o,--out", opts.output_dir, "output directory (overrides config)");
    cmd->add_option("--seed", opts.seed, "seed override");
    cmd->add_option("--shots", opts.shots, "shots override for every plan");
    cmd->add_option("--threads", opts.threads, "worker threads for sweeps");
}

int die(const std::string& what) {
    std::fprintf(stderr, "error: %s: %s\n", what.c_str(), fl_last_error());
    return 1;
}

ConfigPtr load_config_or_exit(const CommonOpts& opts, int& rc) {
    fl_config* raw = nullptr;
    if (fl_config_load(opts.config_path.c_str(), &raw) != FL_OK) {
        rc = die("loading config '" + opts.config_path + "'");
        return nullptr;
    }
    ConfigPtr cfg(raw);
    if (!opts.output_dir.empty() &&
        fl_config_set_output_dir(cfg.get(), opts.output_dir.c_str()) != FL_OK) {
        rc = die("setting output dir");
        return nullptr;
    }
    if (opts.seed != 0 && fl_config_set_seed(cfg.get(), opts.seed) != FL_OK) {
        rc = die("setting seed");
        return nullptr;
    }
    if (opts.shots != 0 && fl_config_set_shots(cfg.get(), opts.shots) != FL_OK) {
        rc = die("setting shots");
        return nullptr;
    }
    if (opts.threads != 0 && fl_config_set_threads(cfg.get(), opts.threads) != FL_OK) {
        rc = die("setting threads");
        return nullptr;
    }
    return cfg;
}

int run_simple(const CommonOpts& opts, fl_status (*fn)(const fl_config*, char**),
               const char* name) {
    int rc = 0;
    ConfigPtr cfg = load_config_or_exit(opts, rc);
    if (!cfg) return rc;
    char* summary = nullptr;
    if (fn(cfg.get(), &summary) != FL_OK) return die(name);
    std::printf("%s\n", summary);
    fl_string_free(summary);
    return 0;
}

int run_verify_command(const CommonOpts& opts, bool as_json) {
    char* report = nullptr;
    int n_failed = 0;
    fl_status st;
    if (!opts.config_path.empty()) {
        st = fl_run_verify_file(opts.config_path.c_str(), &report, &n_failed);
    } else {
        st = fl_run_verify(nullptr, &report, &n_failed);
    }
    if (st != FL_OK) return die("verify");

    if (as_json) {
        std::printf("%s\n", report);
        fl_string_free(report);
        return n_failed == 0 ? 0 : 1;
    }
    const auto parsed = nlohmann::json::parse(report);
    fl_string_free(report);
    for (const auto& check : parsed.at("checks")) {
        const bool pass = check.at("pass").get<bool>();
        std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL",
                    check.at("name").get<std::string>().c_str(),
                    check.at("detail").get<std::string>().c_str());
    }
    std::printf("%d/%d checks passed\n",
                static_cast<int>(parsed.at("n_checks").get<int>() - n_failed),
                parsed.at("n_checks").get<int>());
    return n_failed == 0 ? 0 : 1;
}

int run_figures_command(const CommonOpts& opts, const std::string& reports_dir) {
    int rc = 0;
    ConfigPtr cfg = load_config_or_exit(opts, rc);
    if (!cfg) return rc;
    char* summary = nullptr;
    if (fl_run_figures(cfg.get(), reports_dir.empty() ? nullptr : reports_dir.c_str(),
                       &summary) != FL_OK)
        return die("figures");
    std::printf("%s\n", summary);
    fl_string_free(summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"triangular-ladder Bose-Hubbard simulator (fluxladder " +
                 std::string(fl_version()) + ")"};
    app.require_subcommand(1);

    CommonOpts ground_opts, ramp_opts, measure_opts, sweep_opts, verify_opts, figures_opts;
    std::string reports_dir;

    auto* ground = app.add_subcommand("ground", "exact ground state and its observables");
    add_common(ground, ground_opts);
    auto* ramp = app.add_subcommand("ramp", "emulate the state-preparation ramp");
    add_common(ramp, ramp_opts);
    auto* measure =
        app.add_subcommand("measure", "run the measurement plans with projective sampling");
    add_common(measure, measure_opts);
    auto* sweep = app.add_subcommand("sweep", "sweep the leg/rung coupling ratios");
    add_common(sweep, sweep_opts);
    auto* verify = app.add_subcommand("verify", "run the invariant battery");
    add_common(verify, verify_opts, /*config_required=*/false);
    bool verify_json = false;
    verify->add_flag("--json", verify_json, "print the raw JSON report");
    auto* figures = app.add_subcommand("figures", "render SVG figures from report JSONs");
    add_common(figures, figures_opts);
    figures->add_option("--reports", reports_dir, "directory holding report_*.json");

    CLI11_PARSE(app, argc, argv);

    if (ground->parsed()) return run_simple(ground_opts, fl_run_ground, "ground");
    if (ramp->parsed()) return run_simple(ramp_opts, fl_run_ramp, "ramp");
    if (measure->parsed()) return run_simple(measure_opts, fl_run_measure, "measure");
    if (sweep->parsed()) return run_simple(sweep_opts, fl_run_sweep, "sweep");
    if (verify->parsed()) return run_verify_command(verify_opts, verify_json);
    if (figures->parsed()) return run_figures_command(figures_opts, reports_dir);
    return 1;
}
