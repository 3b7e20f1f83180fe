#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "fluxladder/config.hpp"
#include "fluxladder/errors.hpp"

using namespace fluxladder;

TEST_CASE("the default config parses and hashes stably") {
    const ExperimentConfig cfg = default_config();
    CHECK(cfg.lattice.n_sites == 8);
    CHECK(cfg.total_number == 4);
    CHECK(cfg.sweep_ratios.size() == 6);
    // plan expansion: 7 currents + 15 correlations + 7 bonds
    CHECK(cfg.plans.size() == 29);
    CHECK(cfg.hash.size() == 16);
    const ExperimentConfig again = parse_config(cfg.canonical_json);
    CHECK(again.hash == cfg.hash);
}

TEST_CASE("schema violations are rejected with the offending key") {
    CHECK_THROWS_WITH_AS(parse_config("not json"), doctest::Contains("invalid JSON"), Error);
    CHECK_THROWS_WITH_AS(parse_config(R"({"version": 2})"),
                         doctest::Contains("version"), Error);
    CHECK_THROWS_WITH_AS(
        parse_config(
            R"({"version": 1, "lattice": {"n_sites": 4, "leg_ratio": 1.0}, "total_number": 2, "bogus": 1})"),
        doctest::Contains("bogus"), Error);
    CHECK_THROWS_WITH_AS(
        parse_config(
            R"({"version": 1, "lattice": {"n_sites": 4, "leg_ratio": 0.0}, "total_number": 2})"),
        doctest::Contains("leg_ratio"), Error);
    CHECK_THROWS_WITH_AS(
        parse_config(
            R"({"version": 1, "lattice": {"n_sites": 4, "leg_ratio": 1.0}, "total_number": 9})"),
        doctest::Contains("total_number"), Error);
}

TEST_CASE("sweep ratios must be finite and nonzero") {
    CHECK_THROWS_AS(parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 4, "leg_ratio": 1.0},
        "total_number": 2,
        "sweep": {"ratios": [1.0, 0.0]}
    })"),
                    Error);
}

TEST_CASE("noise validation runs at parse time") {
    CHECK_THROWS_WITH_AS(parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 4, "leg_ratio": 1.0},
        "total_number": 2,
        "noise": {"t1_us": 10.0, "t2r_us": 25.0}
    })"),
                         doctest::Contains("T2R"), Error);
}

TEST_CASE("plan validation runs at parse time") {
    CHECK_THROWS_WITH_AS(parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 8, "leg_ratio": -1.22},
        "total_number": 4,
        "plans": [{"kind": "current_correlation", "pairs": [3, 4]}]
    })"),
                         doctest::Contains("non-measurable"), Error);
}

TEST_CASE("ratio sign selects the plaquette flux; override wins") {
    const ExperimentConfig cfg = parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 8, "n_max": 1, "j_rung_mhz": 6.1, "leg_ratio": -1.22},
        "total_number": 4
    })");
    const LatticeSpec neg = cfg.spec_for_ratio(-1.22);
    const LatticeSpec pos = cfg.spec_for_ratio(0.98);
    CHECK(plaquette_flux_for_leg_phase(neg.flux) == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(plaquette_flux_for_leg_phase(pos.flux) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(neg.j_leg[0] == doctest::Approx(1.22 * 2.0 * M_PI * 6.1e6).epsilon(1e-12));

    const ExperimentConfig forced = parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 8, "n_max": 1, "leg_ratio": -1.22, "plaquette_flux_over_pi": 0.0},
        "total_number": 4
    })");
    CHECK(plaquette_flux_for_leg_phase(forced.spec_for_ratio(-1.22).flux) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ramp block: units, validation, shape parsing") {
    const ExperimentConfig cfg = parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 8, "n_max": 1, "leg_ratio": -1.22},
        "total_number": 4,
        "mode": "ramp_prepared",
        "ramp": {"excited_sites": [1, 4, 5, 8], "park_detuning_mhz": -150.0,
                 "duration_ns": 300.0, "shape": "linear", "dt_ns": 0.1}
    })");
    REQUIRE(cfg.ramp.has_value());
    CHECK(cfg.ramp->duration_s == doctest::Approx(300e-9).epsilon(1e-14));
    CHECK(cfg.ramp->park_detuning == doctest::Approx(-2.0 * M_PI * 150e6).epsilon(1e-12));
    CHECK(cfg.ramp->dt_s == doctest::Approx(0.1e-9).epsilon(1e-14));

    CHECK_THROWS_WITH_AS(parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 8, "n_max": 1, "leg_ratio": -1.22},
        "total_number": 4,
        "mode": "ramp_prepared"
    })"),
                         doctest::Contains("ramp"), Error);
    CHECK_THROWS_AS(parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 8, "n_max": 1, "leg_ratio": -1.22},
        "total_number": 4,
        "ramp": {"excited_sites": [1, 4, 5], "park_detuning_mhz": -150.0, "duration_ns": 300.0}
    })"),
                    Error);  // excitation count != total_number
}

TEST_CASE("plan units and per-plan overrides") {
    const ExperimentConfig cfg = parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 8, "n_max": 1, "j_rung_mhz": 6.1, "leg_ratio": -1.22},
        "total_number": 4,
        "shots": 5000,
        "plans": [
            {"kind": "bond_kinetic", "pairs": [2], "delta_mhz": 61.0, "shots": 77},
            {"kind": "current", "pairs": [1, 5], "t_bs_ns": 20.49}
        ]
    })");
    REQUIRE(cfg.plans.size() == 2);
    CHECK(cfg.plans[0].delta == doctest::Approx(2.0 * M_PI * 61e6).epsilon(1e-12));
    CHECK(cfg.plans[0].shots == 77);
    CHECK(cfg.plans[1].shots == 5000);
    REQUIRE(cfg.plans[1].t_bs.size() == 2);  // scalar fans out to both pairs
    CHECK(cfg.plans[1].t_bs[0] == doctest::Approx(20.49e-9).epsilon(1e-14));
}

TEST_CASE("every shipped config parses and validates") {
    namespace fs = std::filesystem;
    int seen = 0;
    for (const auto& entry : fs::directory_iterator(FLUXLADDER_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW((void)load_config(entry.path().string()));
        ++seen;
    }
    CHECK(seen >= 4);
}

TEST_CASE("noise times can be given in seconds or microseconds, not both") {
    const ExperimentConfig cfg = parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 2, "n_max": 1, "leg_ratio": 1.0},
        "total_number": 1,
        "noise": {"t1_s": [2.0e-5, 1.8e-5], "t2r_s": 3.0e-6}
    })");
    REQUIRE(cfg.noise.has_value());
    CHECK(cfg.noise->t1[0] == doctest::Approx(2.0e-5).epsilon(1e-14));
    CHECK(cfg.noise->t2r[1] == doctest::Approx(3.0e-6).epsilon(1e-14));
    CHECK_THROWS_AS(parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 2, "n_max": 1, "leg_ratio": 1.0},
        "total_number": 1,
        "noise": {"t1_s": 2.0e-5, "t2r_us": 3.0}
    })"),
                    Error);
}
