#include <doctest.h>

#include "fixtures.hpp"
#include "mfn/error.hpp"
#include "mfn/io.hpp"
#include "mfn/presets.hpp"
#include "mfn/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mfn;
using fx::nA;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path("harness_out") / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Scenario burster(ScenarioKind kind) {
    Scenario s;
    s.kind = kind;
    s.cfg = find_preset("burster")->cfg;
    return s;
}

} // namespace

TEST_CASE("format_double round trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1e-9, 3.2390000000000004e-10, 6.02214076e23}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-9) == "1e-09");
}

TEST_CASE("configuration JSON round trip") {
    BiasConfiguration c = fx::unit_cfg();
    c.inactivation_enabled = true;
    c.g_u = 1.7;
    CHECK(config_from_json(to_json(c)) == c);

    SolverOptions o;
    o.dt = 1e-5;
    o.t_end = 0.25;
    o.thresholds = SpikeThresholds{0.6 * nA, 0.3 * nA};
    o.bursts.max_intra_isi = 0.02;
    const SolverOptions r = solver_from_json(to_json(o));
    CHECK(r.dt == o.dt);
    CHECK(r.t_end == o.t_end);
    CHECK(r.thresholds->rise == o.thresholds->rise);
    CHECK(*r.bursts.max_intra_isi == 0.02);

    const InputSignal in({{0.0, 1 * nA}, {0.5, 2 * nA}});
    CHECK(input_from_json(to_json(in)) == in);
}

TEST_CASE("strict readers name the offending field") {
    Json j = to_json(fx::unit_cfg());
    j["sig_f"]["i_lni"] = 1.0;
    try {
        config_from_json(j);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.where() == "cfg.sig_f.i_lni");
    }
    j = to_json(fx::unit_cfg());
    j["tau_s"] = "fast";
    CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("cfg.tau_s"), ParseError);
    try {
        parse_json_text("{\n  \"a\": 1,\n  \"b\" 2\n}", "x.json");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("scenario save and load") {
    Scenario s = burster(ScenarioKind::staircase);
    s.staircase = StaircaseSpec{{0.1 * nA, 0.2 * nA}, 1.0, 0.5};
    s.solver = SolverOptions{};
    s.solver->t_end = 2.0;
    const fs::path dir = scratch("save");
    save_config(s, dir / "s.json");
    const Scenario r = load_config(dir / "s.json");
    CHECK(r.kind == s.kind);
    CHECK(r.cfg == s.cfg);
    CHECK(r.staircase == s.staircase);
    CHECK(dump_config(r) == dump_config(s));

    std::ofstream(dir / "p.json") << R"({"kind": "classify", "preset": "tonic-spiker"})";
    CHECK(load_config(dir / "p.json").cfg == find_preset("tonic-spiker")->cfg);
    std::ofstream(dir / "bad.json") << R"({"kind": "classify", "preset": "burster", "colour": 1})";
    CHECK_THROWS_AS(load_config(dir / "bad.json"), ParseError);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), Error);
}

TEST_CASE("scenario checks run before computation") {
    Scenario s = burster(ScenarioKind::staircase);
    CHECK_THROWS_AS(check_scenario(s), InputError);
    s.kind = ScenarioKind::temperature_sweep;
    s.temperature = TemperatureSpec{298.15, {600.0}, 0.0};
    CHECK_THROWS_AS(check_scenario(s), DomainError);
    s.kind = ScenarioKind::simulate;
    s.cfg.tau_s = -1;
    CHECK_THROWS_AS(check_scenario(s), ParameterError);
}

TEST_CASE("trace CSV round trip preserves metrics") {
    Scenario s = burster(ScenarioKind::simulate);
    const SolverOptions so = effective_solver(s);
    CHECK(so.t_end == doctest::Approx(9 * s.cfg.tau_u));
    const Trace tr = integrate(s.cfg, effective_input(s), so);
    const fs::path dir = scratch("csv");
    export_trace(tr, dir / "t.csv");
    const Trace back = import_trace(dir / "t.csv");
    REQUIRE(back.size() == tr.size());
    CHECK(back.t == tr.t);
    CHECK(back.i_f == tr.i_f);
    CHECK(back.i_u == tr.i_u);
    CHECK(back.spikes == tr.spikes);
    CHECK(back.bursts == tr.bursts);
    const auto a = firing_metrics(tr, s.cfg);
    const auto b = firing_metrics(back, s.cfg);
    CHECK(a.spike_rate == b.spike_rate);
    CHECK(a.burst_rate == b.burst_rate);
    CHECK(a.spikes_per_burst == b.spikes_per_burst);
    CHECK(a.regime == FiringRegime::bursting);
}

TEST_CASE("empty trace exports a header only") {
    std::ostringstream os;
    write_trace_csv(os, Trace{});
    CHECK(os.str() == std::string(kTraceHeader) + "\n");
    std::istringstream is(os.str());
    CHECK(read_trace_csv(is).empty());
    std::istringstream bad("t_s,i_f_A\n");
    CHECK_THROWS_AS(read_trace_csv(bad), ParseError);
    std::istringstream bad_row(std::string(kTraceHeader) + "\n0,1,2,3,4,0.5\n");
    CHECK_THROWS_AS(read_trace_csv(bad_row), ParseError);
}

TEST_CASE("zero-duration simulate writes one row") {
    Scenario s = burster(ScenarioKind::simulate);
    s.solver = SolverOptions{};
    s.solver->t_end = 0.0;
    const fs::path dir = scratch("zero");
    const auto res = run_scenario(s, dir);
    const Trace tr = import_trace(dir / "trace.csv");
    CHECK(tr.size() == 1);
    CHECK(res.summary["metrics"].is_null());
}

TEST_CASE("zero fast gain simulates as quiescent") {
    Scenario s = burster(ScenarioKind::simulate);
    s.cfg.sig_f.i_gain0 = 0.0;
    s.input = InputSignal::constant(1 * nA);
    const auto res = run_scenario(s, scratch("nogain"));
    CHECK(res.summary["metrics"]["regime"] == "quiescent");
    CHECK(res.summary["metrics"]["spike_count"] == 0);
}

TEST_CASE("staircase scenario writes per-level metrics") {
    Scenario s;
    s.kind = ScenarioKind::staircase;
    s.cfg = find_preset("tonic-spiker")->cfg;
    const double base = find_preset("tonic-spiker")->i_app;
    s.staircase = StaircaseSpec{{0.0, base, 1.2 * base}, 0.0, 0.0};
    const fs::path dir = scratch("stair");
    const auto res = run_scenario(s, dir);
    REQUIRE(res.summary["levels"].size() == 3);
    CHECK(res.summary["levels"][0]["metrics"]["regime"] == "quiescent");
    CHECK(res.summary["levels"][1]["metrics"]["regime"] == "tonic_spiking");
    const std::string csv = slurp(dir / "metrics.csv");
    CHECK(csv.rfind("level,i_app_A,spike_rate_Hz", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("curves scenario exports folds") {
    Scenario s = burster(ScenarioKind::curves);
    s.grid = CurveGrid{0.0, 3 * nA, 512};
    const fs::path dir = scratch("curves");
    const auto res = run_scenario(s, dir);
    const std::string csv = slurp(dir / "curves.csv");
    CHECK(csv.find("# fold,fast,") != std::string::npos);
    CHECK(csv.find("# window,slow,") != std::string::npos);
    CHECK(res.summary["report"]["label"] == "bursting-capable");
    CHECK(fs::exists(dir / "summary.json"));
}
