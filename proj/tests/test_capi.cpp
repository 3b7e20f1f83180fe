// Exercises the shared library strictly through its C interface.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxladder_c.h"

namespace {

struct StrGuard {
    char* s = nullptr;
    ~StrGuard() { fl_string_free(s); }
};

std::string tmp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "fluxladder_capi" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("version and error strings are always available") {
    CHECK(fl_version() != nullptr);
    CHECK(fl_last_error() != nullptr);
}

TEST_CASE("lattice handles: dimensions, spectra, observables") {
    const int n = 8;
    std::vector<double> omega(n, 0.0), u(n, 0.0), jr(n - 1, 1.0), jl(n - 2, 1.22);
    fl_lattice* lat = nullptr;
    REQUIRE(fl_lattice_create(n, 4, 1, omega.data(), u.data(), jr.data(), jl.data(), 0.0, &lat) ==
            FL_OK);
    uint64_t dim = 0;
    CHECK(fl_lattice_dim(lat, &dim) == FL_OK);
    CHECK(dim == 70);

    double e0 = 0.0, e_top = 0.0;
    fl_state* gs = nullptr;
    fl_state* top = nullptr;
    REQUIRE(fl_ground_state(lat, &gs, &e0) == FL_OK);
    REQUIRE(fl_top_state(lat, &top, &e_top) == FL_OK);
    CHECK(e0 < e_top);

    StrGuard report;
    REQUIRE(fl_state_observables_json(lat, gs, &report.s) == FL_OK);
    const auto parsed = nlohmann::json::parse(report.s);
    CHECK(parsed.contains("chiral_c"));
    CHECK(parsed.at("g_matrix").size() == 15);

    double current = 1.0;
    CHECK(fl_state_current(lat, gs, 3, &current) == FL_OK);
    CHECK(std::abs(current) < 1e-10);

    double g17 = 0.0;
    CHECK(fl_state_current_correlation(lat, gs, 1, 7, &g17) == FL_OK);
    CHECK(g17 > 0.0);  // leg phase 0 is the frustrated configuration
    double bad = 0.0;
    CHECK(fl_state_current_correlation(lat, gs, 3, 4, &bad) == FL_ERR_NON_MEASURABLE_PAIR);
    CHECK(std::string(fl_last_error()).find("non-measurable") != std::string::npos);

    StrGuard triplets;
    REQUIRE(fl_lattice_hamiltonian_triplets(lat, &triplets.s) == FL_OK);
    CHECK(std::strlen(triplets.s) > 0);

    StrGuard csv;
    const char* plan = R"({"kind": "current", "pairs": [2], "shots": 1000, "seed": 4})";
    REQUIRE(fl_sample_csv(lat, gs, plan, &csv.s) == FL_OK);
    const std::string table(csv.s);
    CHECK(table.rfind("bitstring,count", 0) == 0);
    std::uint64_t total = 0;
    std::istringstream rows(table.substr(table.find('\n') + 1));
    std::string line;
    while (std::getline(rows, line)) {
        CHECK(line.find(',') == 8);  // eight digit sites
        total += std::stoull(line.substr(line.find(',') + 1));
    }
    CHECK(total == 1000);

    fl_state_free(gs);
    fl_state_free(top);
    fl_lattice_free(lat);
}

TEST_CASE("invalid handles and arguments map onto error codes") {
    CHECK(fl_lattice_dim(nullptr, nullptr) == FL_ERR_BAD_HANDLE);
    fl_lattice* lat = nullptr;
    std::vector<double> omega(4, 0.0), u(4, 0.0), jr(3, -1.0), jl(2, 1.0);
    CHECK(fl_lattice_create(4, 2, 1, omega.data(), u.data(), jr.data(), jl.data(), 0.0, &lat) ==
          FL_ERR_INVALID_ARGUMENT);  // negative rung coupling
    fl_config* cfg = nullptr;
    CHECK(fl_config_load("/nonexistent/config.json", &cfg) == FL_ERR_IO);
    CHECK(fl_config_parse("{\"version\": 7}", &cfg) == FL_ERR_CONFIG);
}

TEST_CASE("config handles drive the sweep runner") {
    fl_config* cfg = nullptr;
    const std::string json = R"({
        "version": 1,
        "lattice": {"n_sites": 5, "n_max": 1, "j_rung_mhz": 6.1, "leg_ratio": -1.22},
        "total_number": 2,
        "sweep": {"ratios": [-1.22]},
        "plans": [{"kind": "current", "pairs": [1], "shots": 500}],
        "seed": 12
    })";
    REQUIRE(fl_config_parse(json.c_str(), &cfg) == FL_OK);
    StrGuard hash;
    CHECK(fl_config_hash(cfg, &hash.s) == FL_OK);
    CHECK(std::strlen(hash.s) == 16);

    const std::string out = tmp_dir("sweep");
    REQUIRE(fl_config_set_output_dir(cfg, out.c_str()) == FL_OK);
    REQUIRE(fl_config_set_seed(cfg, 99) == FL_OK);
    REQUIRE(fl_config_set_shots(cfg, 800) == FL_OK);
    StrGuard summary;
    REQUIRE(fl_run_sweep(cfg, &summary.s) == FL_OK);
    CHECK(std::filesystem::exists(std::filesystem::path(out) / "summary.json"));

    StrGuard figures;
    REQUIRE(fl_run_figures(cfg, out.c_str(), &figures.s) == FL_OK);
    CHECK(nlohmann::json::parse(figures.s).at("files").size() == 3);

    StrGuard ground;
    REQUIRE(fl_run_ground(cfg, &ground.s) == FL_OK);
    CHECK(nlohmann::json::parse(ground.s).at("energy_over_j").get<double>() < 0.0);
    fl_config_free(cfg);
}

TEST_CASE("the built-in default config is reachable through the C interface") {
    fl_config* cfg = nullptr;
    REQUIRE(fl_config_default(&cfg) == FL_OK);
    StrGuard hash;
    CHECK(fl_config_hash(cfg, &hash.s) == FL_OK);
    fl_config_free(cfg);
}

TEST_CASE("verify runs through the C interface") {
    StrGuard report;
    int n_failed = -1;
    REQUIRE(fl_run_verify(nullptr, &report.s, &n_failed) == FL_OK);
    CHECK(n_failed == 0);
    const auto parsed = nlohmann::json::parse(report.s);
    CHECK(parsed.at("n_failed").get<int>() == 0);
    CHECK(parsed.at("checks").size() >= 26);

    // a config violating a model invariant fails as a check, not an error
    const std::string dir = tmp_dir("verify");
    const std::string bad_path = dir + "/bad.json";
    std::ofstream(bad_path) << R"({
        "version": 1,
        "lattice": {"n_sites": 4, "n_max": 1, "leg_ratio": 1.0},
        "total_number": 2,
        "noise": {"t1_us": 10.0, "t2r_us": 25.0}
    })";
    StrGuard bad_report;
    int bad_failed = 0;
    REQUIRE(fl_run_verify_file(bad_path.c_str(), &bad_report.s, &bad_failed) == FL_OK);
    CHECK(bad_failed >= 1);
}
