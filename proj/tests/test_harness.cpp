#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "oamsec/ber.hpp"
#include "oamsec/error.hpp"
#include "oamsec/log.hpp"
#include "oamsec/records.hpp"
#include "oamsec/scenario.hpp"
#include "oamsec/schemes.hpp"
#include "oamsec/sweep.hpp"
#include "oracles.hpp"

using namespace oamsec;
namespace fs = std::filesystem;

namespace {

Scenario small_desk() {
    Scenario s = desk_scenario();
    s.set_ris_elements(4, 4);
    return s;
}

AoConfig quick() {
    AoConfig c;
    c.max_outer_iters = 4;
    return c;
}

// Minimal RFC 4180 reader, enough for the result files.
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields(1);
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    fields.back() += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    fields.back() += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.emplace_back();
            } else {
                fields.back() += c;
            }
        }
        rows.push_back(fields);
    }
    return rows;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("oamsec_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("paper_default loads the published deployment") {
    const Scenario s = paper_default();
    const Deployment d = s.deployment();
    CHECK((d.bob.center - Vec3(0, 0, 40)).norm() < 1e-15);
    CHECK((d.ris1.center - Vec3(2, 0, 0.3)).norm() < 1e-15);
    CHECK((d.ris2.center - Vec3(1, 0, 39.7)).norm() < 1e-15);
    CHECK((d.alice.center - Vec3::Zero()).norm() < 1e-15);
    CHECK(s.noise.sigma_b2 == doctest::Approx(1e-5).epsilon(1e-12));
    CHECK(s.noise.sigma_e2 == doctest::Approx(1e-5).epsilon(1e-12));
    CHECK(s.noise.sigma_r2 == doctest::Approx(1e-9).epsilon(1e-12));
    CHECK(s.p_total == doctest::Approx(1.0));
    CHECK(s.p_t() == doctest::Approx(0.9));
    CHECK(s.p_r2() == doctest::Approx(0.1));
    CHECK(d.alice.count == 8);
    CHECK(d.eve.count == 8);
    CHECK(d.ris1.count() == 40);
    CHECK(d.ris2.count() == 40);
    CHECK(s.n_a == 4);
    CHECK(s.n_s == 3);
    CHECK(s.n_zz == 3);
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("dBm conversion") {
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
    CHECK(dbm_to_watts(-20.0) == doctest::Approx(1e-5));
    CHECK(watts_to_dbm(dbm_to_watts(-47.3)) == doctest::Approx(-47.3));
}

TEST_CASE("scenario JSON") {
    std::vector<std::string> warnings;
    const auto previous = log::set_warning_sink([&](const std::string& m) { warnings.push_back(m); });

    const Scenario s = scenario_from_json_text(R"({
        "preset": "desk",
        "alice": {"radius_m": 0.3, "count": 8},
        "bob": {"radius_m": 0.5},
        "eve": {"radius_m": 0.5, "D_m": 12.5},
        "noise": {"sigma_b2_dbm": -80, "sigma_e2_w": 2e-9},
        "power": {"total_dbm": 33, "rho": 0.7},
        "ris1": {"count": 12}
    })");
    CHECK(s.layout.alice.radius == doctest::Approx(0.3));
    CHECK(s.eve_position.distance == doctest::Approx(12.5));
    CHECK(s.noise.sigma_b2 == doctest::Approx(1e-11));
    CHECK(s.noise.sigma_e2 == doctest::Approx(2e-9));
    CHECK(s.p_total == doctest::Approx(dbm_to_watts(33)));
    CHECK(s.rho == doctest::Approx(0.7));
    CHECK(s.layout.ris1.count() == 12);
    CHECK(warnings.empty());

    // Omitted radius falls back to the default with a warning.
    const Scenario r = scenario_from_json_text(R"({"alice": {"count": 8}})");
    CHECK(r.layout.alice.radius == doctest::Approx(0.5));
    REQUIRE(!warnings.empty());
    CHECK(warnings.front().find("radius_m") != std::string::npos);

    const Scenario back = scenario_from_json_text(scenario_to_json_text(s));
    CHECK(back.noise.sigma_b2 == doctest::Approx(s.noise.sigma_b2));
    CHECK(back.eve_position.distance == doctest::Approx(s.eve_position.distance));
    CHECK(back.layout.ris1.count() == s.layout.ris1.count());
    CHECK(back.rho == doctest::Approx(s.rho));

    log::set_warning_sink(previous);
}

TEST_CASE("scenario JSON errors name the field") {
    auto message = [](const std::string& text) {
        try {
            scenario_from_json_text(text, "cfg");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(R"({"noise": {"sigma_q2_dbm": -10}})").find("cfg.noise.sigma_q2_dbm") != std::string::npos);
    CHECK(message(R"({"power": {"rho": "high"}})").find("cfg.power.rho") != std::string::npos);
    CHECK(message(R"({"power": {"rho": 1.5}})").find("rho") != std::string::npos);
    CHECK(message(R"({"noise": {"sigma_b2_w": 1, "sigma_b2_dbm": 0}})").find("sigma_b2") != std::string::npos);
    CHECK(message(R"({"modes": {"N_A": 4, "N_s": 5}})").find("N_s") != std::string::npos);
    CHECK(!message("{not json").empty());
    CHECK_THROWS_AS(load_scenario("no/such/file.json"), ConfigError);
    CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("scheme identifiers") {
    for (Scheme s : all_schemes()) CHECK(parse_scheme(scheme_name(s)) == s);
    CHECK(all_schemes().size() == 8);
    CHECK(parse_scheme("pa-ris-mimo") == Scheme::mimo);
    CHECK_THROWS_AS(parse_scheme("pa-ris-oam-magic"), ConfigError);
}

TEST_CASE("scheme setups follow their definitions") {
    const Scenario sc = small_desk();
    const SchemeSetup p = setup_scheme(Scheme::proposed, sc, 3);
    CHECK(p.model.codebook.g() == 8);
    CHECK(p.model.rho == doctest::Approx(sc.rho));
    CHECK(p.model.p_t == doctest::Approx(sc.p_t()));
    CHECK(p.model.p_r2 == doctest::Approx(sc.p_r2()));
    CHECK((p.flags.power && p.flags.amplifier && p.flags.theta1 && p.flags.theta2));

    const SchemeSetup no_an = setup_scheme(Scheme::no_an, sc, 3);
    CHECK(no_an.model.rho == 1.0);
    CHECK(no_an.model.codebook.g() == 1);
    CHECK(no_an.model.pair().signal.size() == static_cast<std::size_t>(sc.n_a));
    CHECK(no_an.model.pair().an.empty());

    const SchemeSetup rnd = setup_scheme(Scheme::random_phase, sc, 3);
    CHECK((!rnd.flags.theta1 && !rnd.flags.theta2 && rnd.flags.power && rnd.flags.amplifier));
    CHECK((setup_scheme(Scheme::random_phase, sc, 4).start.ris.theta1 - rnd.start.ris.theta1).norm() > 0.0);

    const SchemeSetup dp = setup_scheme(Scheme::dp, sc, 3);
    CHECK(!dp.flags.amplifier);
    CHECK((dp.start.ris.a - rvec::Ones(dp.model.channels.q2())).norm() == 0.0);
    CHECK(dp.model.noise.sigma_r2 == 0.0);
    CHECK(dp.model.p_t == doctest::Approx(sc.p_total));

    const SchemeSetup sa = setup_scheme(Scheme::sa, sc, 3);
    CHECK(sa.model.channels.q2() == 8);
    CHECK(!sa.flags.theta1);
    CHECK(sa.model.channels.r1e.norm() == 0.0);
    const SchemeSetup sp = setup_scheme(Scheme::sp, sc, 3);
    CHECK((!sp.flags.amplifier && !sp.flags.theta1));

    const SchemeSetup zc = setup_scheme(Scheme::zc, sc, 3);
    const cmat t = zc.model.basis.transmit;
    CHECK((t.adjoint() * t - cmat::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((t - p.model.basis.transmit).norm() > 1e-3);

    const SchemeSetup mimo = setup_scheme(Scheme::mimo, sc, 3);
    CHECK(mimo.mmse_bob);
    CHECK((mimo.model.basis.transmit - cmat::Identity(8, 8)).norm() == 0.0);
    CHECK(mimo.model.pair().an.size() == static_cast<std::size_t>(8 - sc.n_a));
}

TEST_CASE("result records satisfy R_OAM = C_B - R_E and reproduce bit for bit") {
    const Scenario sc = small_desk();
    for (Scheme s : all_schemes()) {
        const ResultRecord r = run_scheme(s, sc, 2, quick());
        CHECK(std::abs(r.r_oam - (r.c_b - r.r_e)) <= 1e-9);
        CHECK(r.scheme == scheme_name(s));
        CHECK(std::isfinite(r.r_oam));
        const ResultRecord again = run_scheme(s, sc, 2, quick());
        CHECK(again.r_oam == r.r_oam);
        CHECK(again.r_b == r.r_b);
        CHECK(again.iterations == r.iterations);
    }
}

TEST_CASE("csv quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678})
        CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("result rows follow the fixed schema") {
    std::ostringstream out;
    write_result_header(out);
    ResultRecord r;
    r.scheme = "we,ird";
    r.parameter = "Q";
    r.value = 16;
    r.seed = 9;
    r.r_oam = 1.25;
    write_result_row(out, r);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "scheme,parameter,value,seed,R_OAM,R_B,R_E,C_B,iterations,wall_time_s");
    CHECK(row.rfind("\"we,ird\",Q,16,9,1.25,", 0) == 0);
}

TEST_CASE("parameter application") {
    const Scenario base = small_desk();
    CHECK(apply_parameter(base, "P_total", 20.0).p_total == doctest::Approx(0.1));
    CHECK(apply_parameter(base, "Q", 24).layout.ris1.count() == 24);
    CHECK(apply_parameter(base, "Q", 24).layout.ris2.count() == 24);
    CHECK(apply_parameter(base, "rho", 0.5).rho == 0.5);
    CHECK(apply_parameter(base, "theta_Ay", 0.2).layout.alice.attitude.rot_y == 0.2);
    CHECK_THROWS_AS(apply_parameter(base, "colour", 1.0), ConfigError);
}

TEST_CASE("sweep spec JSON") {
    const SweepSpec s = sweep_spec_from_json_text(
        R"({"parameter": "rho", "values": [0.5, 0.9], "seeds": 3, "schemes": ["proposed", "dp-ris-oam"],
            "ao": {"max_outer_iters": 7}})");
    CHECK(s.values.size() == 2);
    CHECK(s.seeds.size() == 3);
    CHECK(s.schemes.size() == 2);
    CHECK(s.ao.max_outer_iters == 7);
    CHECK_THROWS_AS(sweep_spec_from_json_text(R"({"parameter": "rho", "values": [], "seeds": 1, "schemes": ["proposed"]})"),
                    ConfigError);
    CHECK_THROWS_AS(sweep_spec_from_json_text(R"({"parameter": "mass", "values": [1], "seeds": 1, "schemes": ["proposed"]})"),
                    ConfigError);
    CHECK_THROWS_AS(
        sweep_spec_from_json_text(R"({"parameter": "Q", "values": [4], "seeds": 1, "schemes": ["proposed"], "x": 1})"),
        ConfigError);
}

TEST_CASE("sweep writes one row per scheme, value and seed, deterministically") {
    TempDir dir;
    SweepSpec spec;
    spec.parameter = "rho";
    spec.values = {0.5, 0.7, 0.9};
    spec.seeds = {0, 1, 2, 3, 4};
    spec.schemes = {Scheme::proposed, Scheme::dp};
    spec.ao = quick();
    const Scenario sc = small_desk();

    const auto rows = run_sweep(spec, sc, dir.file("a.csv"), dir.file("a.json"));
    CHECK(rows.size() == 30);
    const auto a = read_csv(dir.file("a.csv"));
    REQUIRE(a.size() == 31);
    CHECK(a[0] == result_columns());

    run_sweep(spec, sc, dir.file("b.csv"));
    const auto b = read_csv(dir.file("b.csv"));
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].size() == result_columns().size());
        // Everything but the wall time is reproducible.
        for (std::size_t c = 0; c + 1 < a[i].size(); ++c) CHECK(a[i][c] == b[i][c]);
    }
    for (std::size_t i = 1; i < a.size(); ++i)
        CHECK(std::abs(std::stod(a[i][4]) - (std::stod(a[i][7]) - std::stod(a[i][6]))) <= 1e-9);

    std::ifstream js(dir.file("a.json"));
    const nlohmann::json j = nlohmann::json::parse(js);
    REQUIRE(j.size() == 30);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(j[i]["scheme"] == a[i + 1][0]);
        CHECK(j[i]["R_OAM"].get<double>() == std::stod(a[i + 1][4]));
    }
}

TEST_CASE("sweep surfaces I/O failures with the completed row count") {
    SweepSpec spec;
    spec.parameter = "Q";
    spec.values = {4};
    spec.seeds = {0};
    spec.schemes = {Scheme::proposed};
    spec.ao = quick();
    try {
        run_sweep(spec, small_desk(), "/no/such/dir/out.csv");
        FAIL("expected an I/O error");
    } catch (const IoError& e) {
        CHECK(e.completed_rows() == 0);
    }
    if (fs::exists("/dev/full")) {
        try {
            run_sweep(spec, small_desk(), "/dev/full");
            FAIL("expected an I/O error");
        } catch (const IoError& e) {
            CHECK(e.completed_rows() == 0);
        }
    }
}

TEST_CASE("Wilson interval") {
    const Interval i = wilson_interval(50, 100);
    CHECK(i.low < 0.5);
    CHECK(i.high > 0.5);
    CHECK(i.low == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(i.high == doctest::Approx(0.5962).epsilon(1e-3));
    const Interval z = wilson_interval(0, 1000);
    CHECK(z.low == 0.0);
    CHECK(z.high > 0.0);
    CHECK(z.high < 0.01);
    CHECK(wilson_interval(7, 10, 3.0).high - wilson_interval(7, 10, 3.0).low >
          wilson_interval(7, 10).high - wilson_interval(7, 10).low);
}

TEST_CASE("QPSK mapping") {
    for (int b = 0; b < 4; ++b) {
        CHECK(std::abs(qpsk_modulate(b)) == doctest::Approx(1.0));
        CHECK(qpsk_demodulate(qpsk_modulate(b)) == b);
    }
    CHECK(qpsk_ber_awgn(6.0) == doctest::Approx(oracle::qpsk_ber(6.0)).epsilon(1e-12));
}

TEST_CASE("BER tends to one half as the SNR vanishes") {
    const SchemeRun run = run_scheme_full(Scheme::proposed, small_desk(), 1, quick());
    const auto pts = ber_monte_carlo(run.setup.model, run.ao.design, {-60.0}, 20000, 5);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].bob_bits == 20000LL * 2 * 3);
    const Interval b = wilson_interval(pts[0].bob_errors, pts[0].bob_bits, 3.0);
    const Interval e = wilson_interval(pts[0].eve_errors, pts[0].eve_bits, 3.0);
    CHECK(b.low <= 0.5);
    CHECK(b.high >= 0.5);
    CHECK(e.low <= 0.5);
    CHECK(e.high >= 0.5);
    CHECK_THROWS_AS(ber_monte_carlo(run.setup.model, run.ao.design, {0.0}, 0, 1), ConfigError);
}

TEST_CASE("shipped scenario and sweep files load") {
    const std::filesystem::path dir = OAMSEC_SCENARIO_DIR;
    CHECK(scenario_to_json_text(load_scenario((dir / "paper_default.json").string())) ==
          scenario_to_json_text(paper_default()));
    CHECK(scenario_to_json_text(load_scenario((dir / "desk.json").string())) ==
          scenario_to_json_text(desk_scenario()));
    for (const char* name : {"sweep_q.json", "sweep_rho.json", "sweep_power.json", "sweep_theta_ay.json"}) {
        const SweepSpec spec = load_sweep_spec((dir / name).string());
        CHECK(spec.seeds.size() == 20);
        REQUIRE(spec.scenario.has_value());
        CHECK_NOTHROW(load_scenario(*spec.scenario));
    }
}
