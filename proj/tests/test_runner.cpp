#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fluxladder/runner.hpp"
#include "fluxladder/util.hpp"

using namespace fluxladder;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fluxladder_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig small_config(const std::string& out, const std::string& extra = "") {
    ExperimentConfig cfg = parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 6, "n_max": 1, "j_rung_mhz": 6.1, "leg_ratio": -1.22},
        "total_number": 3,
        "sweep": {"ratios": [-1.22, 0.98]},
        "plans": [
            {"kind": "current", "pairs": [], "shots": 4000},
            {"kind": "current_correlation", "pairs": [], "shots": 4000},
            {"kind": "bond_kinetic", "pairs": [], "shots": 4000, "delta_mhz": 61.0}
        ],
        "seed": 91)" + extra +
                                        R"(})");
    cfg.output_dir = out;
    return cfg;
}

// minimal well-formedness scan: every opened tag closes, one root element
bool svg_well_formed(const std::string& text) {
    if (text.rfind("<?xml", 0) != 0) return false;
    std::vector<std::string> stack;
    std::size_t pos = 0;
    while ((pos = text.find('<', pos)) != std::string::npos) {
        if (text.compare(pos, 4, "<!--") == 0) {
            pos = text.find("-->", pos);
            if (pos == std::string::npos) return false;
            continue;
        }
        if (text.compare(pos, 2, "<?") == 0) {
            pos = text.find("?>", pos);
            if (pos == std::string::npos) return false;
            continue;
        }
        const std::size_t end = text.find('>', pos);
        if (end == std::string::npos) return false;
        std::string tag = text.substr(pos + 1, end - pos - 1);
        const bool closing = !tag.empty() && tag[0] == '/';
        const bool self_closing = !tag.empty() && tag.back() == '/';
        if (closing) {
            tag = tag.substr(1);
            if (stack.empty() || stack.back() != tag) return false;
            stack.pop_back();
        } else if (!self_closing) {
            const std::size_t sp = tag.find_first_of(" \t\n");
            stack.push_back(sp == std::string::npos ? tag : tag.substr(0, sp));
        }
        pos = end + 1;
    }
    return stack.empty();
}

}  // namespace

TEST_CASE("sweep produces reports, tables, figures inputs and a summary") {
    const fs::path dir = fresh_dir("sweep");
    const ExperimentConfig cfg = small_config(dir.string());
    const auto summary = nlohmann::json::parse(run_sweep(cfg));
    CHECK(summary.at("points").size() == 2);
    CHECK(fs::exists(dir / "report_m1.22.json"));
    CHECK(fs::exists(dir / "report_p0.98.json"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "g_exact_m1.22.csv"));
    CHECK(fs::exists(dir / "g_shots_m1.22.csv"));

    // outputs embed the config hash
    const std::string csv = read_file((dir / "summary.csv").string());
    CHECK(csv.find(cfg.hash) != std::string::npos);

    const auto report = nlohmann::json::parse(read_file((dir / "report_m1.22.json").string()));
    CHECK(report.at("config_hash").get<std::string>() == cfg.hash);
    CHECK(report.at("plaquette_flux_over_pi").get<double>() == doctest::Approx(1.0));
    CHECK_FALSE(report.at("estimated").is_null());

    // estimated chiral order tracks the exact one on this small system
    const double c_exact = report.at("exact").at("chiral_c").get<double>();
    const double c_est = report.at("estimated").at("chiral_c").get<double>();
    const double c_err = report.at("estimated").at("chiral_c_err").get<double>();
    CHECK(std::abs(c_est - c_exact) < 5.0 * std::max(c_err, 1e-6));
}

TEST_CASE("an empty sweep writes nothing and succeeds") {
    const fs::path dir = fresh_dir("empty");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.sweep_ratios.clear();
    const auto summary = nlohmann::json::parse(run_sweep(cfg));
    CHECK(summary.at("points").empty());
    CHECK(fs::is_empty(dir));
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    (void)run_sweep(small_config(a.string()));
    (void)run_sweep(small_config(b.string()));
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        CAPTURE(name.string());
        CHECK(read_file(entry.path().string()) == read_file((b / name).string()));
    }
    // threads must not change the bytes either
    const fs::path c = fresh_dir("det_c");
    ExperimentConfig threaded = small_config(c.string());
    threaded.threads = 2;
    (void)run_sweep(threaded);
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        CHECK(read_file(entry.path().string()) == read_file((c / name).string()));
    }
}

TEST_CASE("figures render well-formed SVG from sweep reports") {
    const fs::path dir = fresh_dir("figures");
    const ExperimentConfig cfg = small_config(dir.string());
    (void)run_sweep(cfg);
    const auto summary = nlohmann::json::parse(run_figures(cfg, dir.string()));
    CHECK(summary.at("files").size() == 6);  // three figures per ratio
    for (const auto& f : summary.at("files")) {
        const std::string body = read_file(f.get<std::string>());
        CAPTURE(f.get<std::string>());
        CHECK(svg_well_formed(body));
        CHECK(body.find(cfg.hash) != std::string::npos);
    }
}

TEST_CASE("ground and measure runners return machine-readable summaries") {
    const fs::path dir = fresh_dir("ground");
    ExperimentConfig cfg = small_config(dir.string());
    const auto ground = nlohmann::json::parse(run_ground(cfg));
    CHECK(ground.at("ratio").get<double>() == doctest::Approx(-1.22));
    CHECK(ground.at("energy_over_j").get<double>() < 0.0);

    const auto measure = nlohmann::json::parse(run_measure(cfg));
    CHECK(measure.at("plans").get<int>() == 5 + 6 + 5);
}

TEST_CASE("ramp-prepared mode reports a fidelity and maps into the target frame") {
    const fs::path dir = fresh_dir("ramp");
    ExperimentConfig cfg = parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 4, "n_max": 1, "j_rung_mhz": 6.1, "leg_ratio": -1.22},
        "total_number": 2,
        "mode": "ramp_prepared",
        "ramp": {"excited_sites": [1, 4], "park_detuning_mhz": -150.0,
                 "duration_ns": 300.0, "shape": "linear", "dt_ns": 0.1},
        "seed": 3
    })");
    cfg.output_dir = dir.string();
    const auto summary = nlohmann::json::parse(run_ramp(cfg));
    const double fidelity = summary.at("ramp_fidelity").get<double>();
    CHECK(fidelity > 0.5);
    CHECK(fidelity <= 1.0 + 1e-12);
    // the mapped state's energy must sit near the target ground energy
    const auto report = nlohmann::json::parse(read_file((dir / "report_m1.22.json").string()));
    CHECK(report.at("ramp_fidelity").get<double>() == doctest::Approx(fidelity));
}

TEST_CASE("verify battery passes and bad configs fail as checks") {
    const auto checks = run_verify(nullptr);
    int failed = 0;
    for (const auto& c : checks) {
        CAPTURE(c.name);
        CAPTURE(c.detail);
        CHECK(c.pass);
        if (!c.pass) ++failed;
    }
    CHECK(failed == 0);

    const fs::path dir = fresh_dir("verify");
    const fs::path bad = dir / "bad.json";
    write_file(bad.string(), R"({
        "version": 1,
        "lattice": {"n_sites": 4, "n_max": 1, "leg_ratio": 1.0},
        "total_number": 2,
        "noise": {"t1_us": 10.0, "t2r_us": 25.0}
    })");
    const auto results = run_verify_file(bad.string());
    REQUIRE_FALSE(results.empty());
    CHECK(results.front().name == "config_valid");
    CHECK_FALSE(results.front().pass);
    CHECK(results.front().detail.find("T2R") != std::string::npos);

    const fs::path overlap = dir / "overlap.json";
    write_file(overlap.string(), R"({
        "version": 1,
        "lattice": {"n_sites": 8, "n_max": 1, "leg_ratio": -1.22},
        "total_number": 4,
        "plans": [{"kind": "current_correlation", "pairs": [3, 4]}]
    })");
    const auto results2 = run_verify_file(overlap.string());
    CHECK_FALSE(results2.front().pass);
    CHECK(results2.front().detail.find("non-measurable") != std::string::npos);
}

TEST_CASE("a single-ratio correlation run writes a 15-row G table") {
    const fs::path dir = fresh_dir("fifteen");
    ExperimentConfig cfg = parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 8, "n_max": 1, "j_rung_mhz": 6.1, "leg_ratio": -1.22},
        "total_number": 4,
        "sweep": {"ratios": [-1.22]},
        "plans": [{"kind": "current_correlation", "pairs": [], "shots": 2000}],
        "seed": 5
    })");
    cfg.output_dir = dir.string();
    (void)run_sweep(cfg);
    const std::string csv = read_file((dir / "g_shots_m1.22.csv").string());
    // hash comment + header + 15 pair rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
}

TEST_CASE("noisy ramp preparation reports both fidelities and measures from the density") {
    const fs::path dir = fresh_dir("noisy_ramp");
    ExperimentConfig cfg = parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 4, "n_max": 1, "j_rung_mhz": 6.1, "leg_ratio": -1.22},
        "total_number": 2,
        "mode": "ramp_prepared",
        "ramp": {"excited_sites": [1, 4], "park_detuning_mhz": -150.0,
                 "duration_ns": 200.0, "shape": "linear", "dt_ns": 0.2},
        "plans": [{"kind": "current_correlation", "pairs": [1, 3], "shots": 4000}],
        "noise": {"t1_us": 15.0, "t2r_us": 4.0},
        "seed": 6
    })");
    cfg.output_dir = dir.string();
    const SweepPointResult point = evaluate_ratio(cfg, -1.22);
    REQUIRE(point.ramp_fidelity.has_value());
    REQUIRE(point.ramp_fidelity_noisy.has_value());
    // decoherence during the preparation can only hurt
    CHECK(*point.ramp_fidelity_noisy < *point.ramp_fidelity + 1e-9);
    CHECK(*point.ramp_fidelity_noisy > 0.2);
    REQUIRE(point.estimated.has_value());
    REQUIRE(point.tables.size() == 1);
    CHECK(point.tables[0].total == 4000);
}

TEST_CASE("tiny lattices run end to end without a chiral diagnostic") {
    const fs::path dir = fresh_dir("tiny");
    ExperimentConfig cfg = parse_config(R"({
        "version": 1,
        "lattice": {"n_sites": 3, "n_max": 2, "j_rung_mhz": 6.1, "leg_ratio": 1.0},
        "total_number": 2,
        "seed": 2
    })");
    cfg.output_dir = dir.string();
    const auto ground = nlohmann::json::parse(run_ground(cfg));
    CHECK(ground.at("chiral_c").get<double>() == 0.0);
    const auto figures = nlohmann::json::parse(run_figures(cfg, dir.string()));
    CHECK(figures.at("files").size() == 3);
}
