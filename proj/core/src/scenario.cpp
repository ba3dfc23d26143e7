#include "mfn/scenario.hpp"

#include "mfn/device_map.hpp"
#include "mfn/error.hpp"
#include "mfn/presets.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace mfn {

namespace {

constexpr const char* kKindNames[] = {"simulate",  "staircase",           "neuromod-sweep", "temperature-sweep",
                                      "inactivation-compare", "curves", "classify"};

Json number_array(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

std::vector<double> read_numbers(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) throw ParseError(where + "[" + std::to_string(k) + "]", "expected a number");
        out.push_back(j[k].get<double>());
    }
    return out;
}

void check_object_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ParseError(where, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ParseError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

double num_field(const Json& j, const char* key, const std::string& where, std::optional<double> fallback) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ParseError(where + "." + key, "missing field");
    }
    if (!j.at(key).is_number()) throw ParseError(where + "." + key, "expected a number");
    return j.at(key).get<double>();
}

Json trace_summary(const Trace& tr) {
    Json bursts = Json::array();
    for (const auto& b : tr.bursts) bursts.push_back(to_json(b));
    return {{"samples", tr.size()}, {"dt", tr.dt}, {"spikes", number_array(tr.spikes)}, {"bursts", bursts}};
}

double frequency_of(const FiringMetrics& m) {
    return m.regime == FiringRegime::bursting && m.burst_rate ? *m.burst_rate : m.spike_rate;
}

} // namespace

const char* to_string(ScenarioKind k) noexcept { return kKindNames[static_cast<int>(k)]; }

ScenarioKind parse_scenario_kind(const std::string& s) {
    for (int k = 0; k < 7; ++k)
        if (s == kKindNames[k]) return static_cast<ScenarioKind>(k);
    throw ParseError("kind", "unknown scenario kind '" + s + "'");
}

Json to_json(const Scenario& s) {
    Json j;
    j["kind"] = to_string(s.kind);
    j["cfg"] = to_json(s.cfg);
    if (s.input) j["input"] = to_json(*s.input);
    if (s.solver) j["solver"] = to_json(*s.solver);
    if (s.staircase)
        j["staircase"] = {{"amplitudes", number_array(s.staircase->amplitudes)},
                          {"level_duration", s.staircase->level_duration},
                          {"settle", s.staircase->settle}};
    if (s.sweep) j["sweep"] = to_json(*s.sweep);
    if (s.temperature)
        j["temperature"] = {{"t_base", s.temperature->t_base},
                            {"temperatures", number_array(s.temperature->temperatures)},
                            {"alpha", s.temperature->alpha}};
    if (s.grid) j["grid"] = to_json(*s.grid);
    if (!s.output_dir.empty()) j["output_dir"] = s.output_dir;
    return j;
}

Scenario scenario_from_json(const Json& j) {
    check_object_keys(j, "", {"kind", "cfg", "preset", "input", "solver", "staircase", "sweep", "temperature", "grid",
                              "output_dir"});
    Scenario s;
    if (!j.contains("kind") || !j["kind"].is_string()) throw ParseError("kind", "missing or not a string");
    s.kind = parse_scenario_kind(j["kind"].get<std::string>());

    if (j.contains("cfg") && j.contains("preset")) throw ParseError("preset", "give either cfg or preset, not both");
    if (j.contains("preset")) {
        if (!j["preset"].is_string()) throw ParseError("preset", "expected a string");
        const auto p = find_preset(j["preset"].get<std::string>());
        if (!p) throw ParseError("preset", "unknown preset '" + j["preset"].get<std::string>() + "'");
        s.cfg = p->cfg;
    } else if (j.contains("cfg")) {
        s.cfg = config_from_json(j["cfg"], "cfg");
    } else {
        throw ParseError("cfg", "missing field");
    }

    if (j.contains("input")) s.input = input_from_json(j["input"], "input");
    if (j.contains("solver")) s.solver = solver_from_json(j["solver"], "solver");
    if (j.contains("staircase")) {
        const Json& st = j["staircase"];
        check_object_keys(st, "staircase", {"amplitudes", "level_duration", "settle"});
        if (!st.contains("amplitudes")) throw ParseError("staircase.amplitudes", "missing field");
        s.staircase = StaircaseSpec{read_numbers(st["amplitudes"], "staircase.amplitudes"),
                                    num_field(st, "level_duration", "staircase", 0.0),
                                    num_field(st, "settle", "staircase", 0.0)};
    }
    if (j.contains("sweep")) s.sweep = sweep_from_json(j["sweep"], "sweep");
    if (j.contains("temperature")) {
        const Json& t = j["temperature"];
        check_object_keys(t, "temperature", {"t_base", "temperatures", "alpha"});
        if (!t.contains("temperatures")) throw ParseError("temperature.temperatures", "missing field");
        s.temperature = TemperatureSpec{num_field(t, "t_base", "temperature", 298.15),
                                        read_numbers(t["temperatures"], "temperature.temperatures"),
                                        num_field(t, "alpha", "temperature", 0.0)};
    }
    if (j.contains("grid")) s.grid = grid_from_json(j["grid"], "grid");
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw ParseError("output_dir", "expected a string");
        s.output_dir = j["output_dir"].get<std::string>();
    }
    return s;
}

Scenario load_config(const std::filesystem::path& path) {
    const Json j = read_json_file(path);
    try {
        return scenario_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
    }
}

std::string dump_config(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

void save_config(const Scenario& s, const std::filesystem::path& path) { write_text_file(path, dump_config(s)); }

void check_scenario(const Scenario& s) {
    validate(s.cfg);
    switch (s.kind) {
    case ScenarioKind::staircase:
        if (!s.staircase || s.staircase->amplitudes.empty())
            throw InputError("staircase scenario needs staircase.amplitudes");
        for (double a : s.staircase->amplitudes)
            if (!(a >= 0.0) || !std::isfinite(a)) throw ParameterError("staircase amplitudes must be >= 0");
        break;
    case ScenarioKind::neuromod_sweep:
        if (!s.sweep) throw InputError("neuromod-sweep scenario needs a sweep section");
        break;
    case ScenarioKind::temperature_sweep:
        if (!s.temperature || s.temperature->temperatures.empty())
            throw InputError("temperature-sweep scenario needs temperature.temperatures");
        for (double t : s.temperature->temperatures) temperature_speedup(s.temperature->t_base, t);
        break;
    default: break;
    }
    if (s.solver) {
        if (!(s.solver->t_end >= 0.0)) throw ParameterError("solver.t_end must be non-negative");
        if (s.solver->record_stride < 1) throw ParameterError("solver.record_stride must be >= 1");
    }
}

SolverOptions effective_solver(const Scenario& s) {
    if (s.solver) return *s.solver;
    SolverOptions o;
    o.t_end = kDefaultRunTauU * s.cfg.tau_u;
    return o;
}

InputSignal effective_input(const Scenario& s) {
    if (s.input) return *s.input;
    const auto i = confirmation_input(classify(s.cfg), s.cfg);
    return InputSignal::constant(i.value_or(0.0));
}

EventShape measure_events(const Trace& tr, const BiasConfiguration& cfg, const SolverOptions& opts) {
    EventShape e;
    MetricsOptions mo;
    mo.window_start = (tr.empty() ? 0.0 : tr.t.front()) + kTransientUltraslowMultiple * cfg.tau_u;
    mo.bursts = opts.bursts;
    e.metrics = firing_metrics(tr, mo);
    const auto th = opts.thresholds ? opts.thresholds : default_thresholds(cfg);
    if (!th) return e;
    const auto ext = spike_extents(tr, *th, mo.window_start);
    if (!ext.empty()) {
        double w = 0.0;
        for (const auto& x : ext) w += x.width();
        e.mean_spike_width = w / static_cast<double>(ext.size());
    }
    const auto durs = burst_durations(tr, *th, mo.window_start, opts.bursts);
    if (!durs.empty())
        e.mean_burst_duration = std::accumulate(durs.begin(), durs.end(), 0.0) / static_cast<double>(durs.size());
    return e;
}

ScenarioResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir) {
    check_scenario(s);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw Error("cannot create output directory " + out_dir.string());

    ScenarioResult res;
    Json& sum = res.summary;
    sum["kind"] = to_string(s.kind);
    sum["cfg"] = to_json(s.cfg);
    auto emit_trace = [&](const Trace& tr, const std::string& name) {
        const auto p = out_dir / name;
        export_trace(tr, p);
        res.files.push_back(p);
    };

    const SolverOptions so = effective_solver(s);

    switch (s.kind) {
    case ScenarioKind::simulate: {
        const InputSignal in = effective_input(s);
        const Trace tr = integrate(s.cfg, in, so);
        emit_trace(tr, "trace.csv");
        sum["input"] = to_json(in);
        sum["warnings"] = tr.warnings;
        sum["trace"] = trace_summary(tr);
        // A single-sample trace has no window to measure.
        if (tr.size() > 1) {
            MetricsOptions mo;
            mo.window_start = std::min(kTransientUltraslowMultiple * s.cfg.tau_u, 0.5 * tr.t.back());
            mo.bursts = so.bursts;
            sum["metrics"] = to_json(firing_metrics(tr, mo));
        } else {
            sum["metrics"] = nullptr;
        }
        break;
    }
    case ScenarioKind::staircase: {
        const auto& st = *s.staircase;
        const double L = st.level_duration > 0.0 ? st.level_duration : kDefaultRunTauU * s.cfg.tau_u;
        const double settle = st.settle > 0.0 ? st.settle : kTransientUltraslowMultiple * s.cfg.tau_u;
        if (!(settle < L)) throw ParameterError("staircase settle time must be shorter than a level");
        SolverOptions o = so;
        o.t_end = L * static_cast<double>(st.amplitudes.size());
        const InputSignal in = InputSignal::staircase(st.amplitudes, L);
        const Trace tr = integrate(s.cfg, in, o);
        emit_trace(tr, "trace.csv");
        std::ostringstream csv;
        csv << "level,i_app_A,spike_rate_Hz,burst_rate_Hz,mean_spikes_per_burst,regime\n";
        Json levels = Json::array();
        for (std::size_t k = 0; k < st.amplitudes.size(); ++k) {
            MetricsOptions mo;
            mo.window_start = static_cast<double>(k) * L + settle;
            mo.window_end = std::min(static_cast<double>(k + 1) * L, tr.t.back());
            mo.bursts = o.bursts;
            const FiringMetrics m = firing_metrics(tr, mo);
            levels.push_back({{"i_app", st.amplitudes[k]}, {"metrics", to_json(m)}});
            csv << k << ',' << format_double(st.amplitudes[k]) << ',' << format_double(m.spike_rate) << ','
                << (m.burst_rate ? format_double(*m.burst_rate) : "") << ',' << format_double(m.mean_spikes_per_burst)
                << ',' << to_string(m.regime) << '\n';
        }
        write_text_file(out_dir / "metrics.csv", csv.str());
        res.files.push_back(out_dir / "metrics.csv");
        sum["level_duration"] = L;
        sum["settle"] = settle;
        sum["levels"] = levels;
        sum["warnings"] = tr.warnings;
        break;
    }
    case ScenarioKind::neuromod_sweep: {
        const SweepReport rep = neuromod_sweep(s.cfg, *s.sweep);
        std::ostringstream csv;
        csv << "step,value,label,i_app_A,regime,spike_rate_Hz,burst_rate_Hz,mean_spikes_per_burst\n";
        for (std::size_t k = 0; k < rep.steps.size(); ++k) {
            const auto& st = rep.steps[k];
            csv << k << ',' << format_double(st.value) << ',' << to_string(st.label) << ','
                << (st.input ? format_double(*st.input) : "") << ',';
            if (st.metrics)
                csv << to_string(st.metrics->regime) << ',' << format_double(st.metrics->spike_rate) << ','
                    << (st.metrics->burst_rate ? format_double(*st.metrics->burst_rate) : "") << ','
                    << format_double(st.metrics->mean_spikes_per_burst);
            else
                csv << ",,,";
            csv << '\n';
        }
        write_text_file(out_dir / "sweep.csv", csv.str());
        res.files.push_back(out_dir / "sweep.csv");
        sum["sweep"] = to_json(*s.sweep);
        sum["report"] = to_json(rep);
        break;
    }
    case ScenarioKind::temperature_sweep: {
        const auto& ts = *s.temperature;
        const TempModel tm{ts.alpha > 0.0 ? ts.alpha : 0.0};
        const InputSignal in = effective_input(s);
        Json points = Json::array();
        std::ostringstream csv;
        csv << "temperature_K,speedup,regime,spike_rate_Hz,burst_rate_Hz,frequency_Hz,mean_spikes_per_burst\n";
        for (double T : ts.temperatures) {
            const double sp = temperature_speedup(ts.t_base, T, tm);
            const BiasConfiguration c = temperature_transform(s.cfg, ts.t_base, T, tm);
            const SolverOptions o = scale_solver(so, sp);
            const Trace tr = integrate(c, scale_input(in, sp), o);
            const FiringMetrics m = measure_events(tr, c, o).metrics;
            std::ostringstream name;
            name << "trace_" << format_double(T) << "K.csv";
            emit_trace(tr, name.str());
            points.push_back({{"temperature", T},
                              {"speedup", sp},
                              {"frequency", frequency_of(m)},
                              {"metrics", to_json(m)}});
            csv << format_double(T) << ',' << format_double(sp) << ',' << to_string(m.regime) << ','
                << format_double(m.spike_rate) << ',' << (m.burst_rate ? format_double(*m.burst_rate) : "") << ','
                << format_double(frequency_of(m)) << ',' << format_double(m.mean_spikes_per_burst) << '\n';
        }
        write_text_file(out_dir / "metrics.csv", csv.str());
        res.files.push_back(out_dir / "metrics.csv");
        sum["input"] = to_json(in);
        sum["t_base"] = ts.t_base;
        sum["alpha"] = ts.alpha > 0.0 ? ts.alpha : calibrated_alpha();
        sum["points"] = points;
        break;
    }
    case ScenarioKind::inactivation_compare: {
        const InputSignal in = effective_input(s);
        Json runs;
        for (bool on : {false, true}) {
            BiasConfiguration c = s.cfg;
            c.inactivation_enabled = on;
            const Trace tr = integrate(c, in, so);
            const EventShape e = measure_events(tr, c, so);
            emit_trace(tr, on ? "trace_on.csv" : "trace_off.csv");
            runs[on ? "on" : "off"] = {{"metrics", to_json(e.metrics)},
                                      {"mean_spike_width", e.mean_spike_width},
                                      {"mean_burst_duration",
                                       e.mean_burst_duration ? Json(*e.mean_burst_duration) : Json(nullptr)}};
        }
        sum["input"] = to_json(in);
        sum["runs"] = runs;
        break;
    }
    case ScenarioKind::curves: {
        const CurveSet cs = s.grid ? steady_state_curves(s.cfg, *s.grid) : steady_state_curves(s.cfg);
        export_curves(cs, out_dir / "curves.csv");
        res.files.push_back(out_dir / "curves.csv");
        sum["fast"] = to_json(cs.fast);
        sum["slow"] = to_json(cs.slow);
        sum["ultraslow"] = to_json(cs.ultraslow);
        sum["report"] = to_json(classify_regime(cs));
        break;
    }
    case ScenarioKind::classify: {
        const CurveSet cs = s.grid ? steady_state_curves(s.cfg, *s.grid) : steady_state_curves(s.cfg);
        const RegimeReport r = classify_regime(cs);
        sum["report"] = to_json(r);
        const auto i = confirmation_input(r, s.cfg);
        sum["confirmation_input"] = i ? Json(*i) : Json(nullptr);
        break;
    }
    }

    write_text_file(out_dir / "summary.json", sum.dump(2) + "\n");
    res.files.push_back(out_dir / "summary.json");
    return res;
}

} // namespace mfn
