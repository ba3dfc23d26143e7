// Command-line front end: one subcommand per scenario kind, plus `serve`.

#include "mfn/analysis.hpp"
#include "mfn/error.hpp"
#include "mfn/presets.hpp"
#include "mfn/scenario.hpp"
#include "mfn/service.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

struct Common {
    std::string config;
    std::string preset = "burster";
    std::string out;
    double dt = 0.0;
    double t_end = 0.0;
    bool seedless = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "Scenario file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--preset", c.preset, "Named preset used when no config is given")->capture_default_str();
    sub->add_option("--out", c.out, "Output directory (default out/<kind>)");
    sub->add_option("--dt", c.dt, "Integration step (s)")->check(CLI::PositiveNumber);
    sub->add_option("--t-end", c.t_end, "Simulated duration (s)")->check(CLI::PositiveNumber);
    sub->add_flag("--seedless", c.seedless, "Accepted for scripts; every run is deterministic and uses no RNG");
}

mfn::Scenario base_scenario(const Common& c, mfn::ScenarioKind kind) {
    mfn::Scenario s;
    if (!c.config.empty()) {
        s = mfn::load_config(c.config);
    } else {
        const auto p = mfn::find_preset(c.preset);
        if (!p) throw mfn::ParseError("--preset", "unknown preset '" + c.preset + "'");
        s.cfg = p->cfg;
    }
    s.kind = kind;
    if (c.dt > 0.0 || c.t_end > 0.0) {
        mfn::SolverOptions o = mfn::effective_solver(s);
        if (c.dt > 0.0) o.dt = c.dt;
        if (c.t_end > 0.0) o.t_end = c.t_end;
        s.solver = o;
    }
    return s;
}

int run(const mfn::Scenario& s, const Common& c) {
    std::string dir = !c.out.empty() ? c.out : !s.output_dir.empty() ? s.output_dir : std::string("out/") + mfn::to_string(s.kind);
    const auto res = mfn::run_scenario(s, dir);
    std::cout << res.summary.dump(2) << "\n";
    for (const auto& f : res.files) std::cerr << "wrote " << f.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed-feedback neuron simulator"};
    app.require_subcommand(1);

    std::map<std::string, Common> common;
    auto make = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, common[name]);
        return sub;
    };

    auto* sim = make("simulate", "Integrate and report spikes, bursts and firing metrics");
    double i_app = -1.0;
    sim->add_option("--i-app", i_app, "Constant input (A); default is the classifier's confirmation input");

    auto* curves = make("curves", "Steady-state curves with fold annotations");
    int points = 4096;
    curves->add_option("--points", points, "Grid resolution")->check(CLI::Range(256, 1 << 22));

    make("classify", "Regime classification from the curve geometry");

    auto* sweep = make("sweep", "Neuromodulation sweep of one bias parameter");
    std::string param = "sig_s.i_gain0";
    double lo = 0.0, hi = 0.0;
    int steps = 16;
    bool no_sim = false;
    sweep->add_option("--param", param, "Parameter to sweep")->capture_default_str();
    sweep->add_option("--lo", lo, "Lower end (default: half the current value)");
    sweep->add_option("--hi", hi, "Upper end (default: twice the current value)");
    sweep->add_option("--steps", steps, "Number of steps")->check(CLI::Range(8, 10000))->capture_default_str();
    sweep->add_flag("--no-sim", no_sim, "Skip confirmation simulations");

    auto* stair = make("staircase", "Input staircase; per-level firing metrics");
    std::vector<double> amplitudes;
    double level = 0.0;
    stair->add_option("--amplitudes", amplitudes, "Level amplitudes (A); default spans 0.8x to 3x the confirmation input");
    stair->add_option("--level-duration", level, "Seconds per level (default 9 tau_u)");

    auto* temp = make("tempsweep", "Temperature sweep under the uniform speedup model");
    std::vector<double> temps{278.15, 298.15, 318.15};
    double t_base = 298.15;
    temp->add_option("--temps", temps, "Temperatures (K)");
    temp->add_option("--t-base", t_base, "Temperature at which the configuration holds (K)");

    make("compare-inactivation", "Same biases with inactivation off and on");

    auto* serve = app.add_subcommand("serve", "Start the HTTP service");
    std::string host = "127.0.0.1";
    int port = 8080;
    double max_t_end = 30.0;
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->check(CLI::Range(1, 65535))->capture_default_str();
    serve->add_option("--max-t-end", max_t_end, "Cap on simulated time per request (s)")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve->parsed()) {
            mfn::ServiceLimits lim;
            lim.max_t_end = max_t_end;
            return mfn::serve(host, port, lim) ? 0 : 1;
        }
        if (sim->parsed()) {
            auto s = base_scenario(common["simulate"], mfn::ScenarioKind::simulate);
            if (i_app >= 0.0) s.input = mfn::InputSignal::constant(i_app);
            return run(s, common["simulate"]);
        }
        if (curves->parsed()) {
            auto s = base_scenario(common["curves"], mfn::ScenarioKind::curves);
            if (!s.grid) s.grid = mfn::default_grid(s.cfg, points);
            return run(s, common["curves"]);
        }
        if (app.got_subcommand("classify"))
            return run(base_scenario(common["classify"], mfn::ScenarioKind::classify), common["classify"]);
        if (sweep->parsed()) {
            auto s = base_scenario(common["sweep"], mfn::ScenarioKind::neuromod_sweep);
            if (!s.sweep || sweep->count("--param") || sweep->count("--lo") || sweep->count("--hi")) {
                mfn::SweepOptions o = s.sweep.value_or(mfn::SweepOptions{});
                o.param = mfn::parse_sweep_param(param);
                const double v = mfn::get_param(s.cfg, o.param);
                o.lo = lo > 0.0 ? lo : 0.5 * v;
                o.hi = hi > 0.0 ? hi : 2.0 * v;
                o.steps = steps;
                s.sweep = o;
            }
            if (no_sim) s.sweep->simulate = false;
            return run(s, common["sweep"]);
        }
        if (stair->parsed()) {
            auto s = base_scenario(common["staircase"], mfn::ScenarioKind::staircase);
            if (!s.staircase || !amplitudes.empty()) {
                mfn::StaircaseSpec st = s.staircase.value_or(mfn::StaircaseSpec{});
                if (amplitudes.empty()) {
                    const auto base = mfn::confirmation_input(mfn::classify(s.cfg), s.cfg);
                    if (!base) throw mfn::InputError("no confirmation input for this configuration; pass --amplitudes");
                    for (double f : {0.8, 1.0, 1.3, 1.7, 2.2, 3.0}) st.amplitudes.push_back(f * *base);
                } else {
                    st.amplitudes = amplitudes;
                }
                if (level > 0.0) st.level_duration = level;
                s.staircase = st;
            }
            return run(s, common["staircase"]);
        }
        if (temp->parsed()) {
            auto s = base_scenario(common["tempsweep"], mfn::ScenarioKind::temperature_sweep);
            if (!s.temperature || temp->count("--temps") || temp->count("--t-base"))
                s.temperature = mfn::TemperatureSpec{t_base, temps, 0.0};
            return run(s, common["tempsweep"]);
        }
        if (app.got_subcommand("compare-inactivation"))
            return run(base_scenario(common["compare-inactivation"], mfn::ScenarioKind::inactivation_compare),
                       common["compare-inactivation"]);
    } catch (const mfn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
