#include "mfn/io.hpp"

#include "mfn/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace mfn {

namespace {

// Strict object reader: every key must be consumed before finish().
class Reader {
public:
    Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ParseError(where_, "expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    const Json& raw(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ParseError(path(key), "missing field");
        return j_.at(key);
    }

    double number(const char* key) {
        const Json& v = raw(key);
        if (!v.is_number()) throw ParseError(path(key), "expected a number");
        return v.get<double>();
    }
    double number(const char* key, double fallback) { return has(key) ? number(key) : fallback; }

    std::optional<double> optional_number(const char* key) {
        if (!has(key)) return std::nullopt;
        const Json& v = raw(key);
        if (v.is_null()) return std::nullopt;
        if (!v.is_number()) throw ParseError(path(key), "expected a number or null");
        return v.get<double>();
    }

    int integer(const char* key, int fallback) {
        if (!has(key)) return fallback;
        const Json& v = raw(key);
        if (!v.is_number_integer()) throw ParseError(path(key), "expected an integer");
        return v.get<int>();
    }

    bool boolean(const char* key, bool fallback) {
        if (!has(key)) return fallback;
        const Json& v = raw(key);
        if (!v.is_boolean()) throw ParseError(path(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const char* key) {
        const Json& v = raw(key);
        if (!v.is_string()) throw ParseError(path(key), "expected a string");
        return v.get<std::string>();
    }

    std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ParseError(path(it.key()), "unknown key");
    }

private:
    const Json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Re-throws library validation failures as parse errors at `where`.
template <class F>
void checked(const std::string& where, F&& f) {
    try {
        f();
    } catch (const ParameterError& e) {
        throw ParseError(where, e.what());
    }
}

} // namespace

Json to_json(const SigmoidParams& p) { return {{"i_thr", p.i_thr}, {"i_lin", p.i_lin}, {"i_gain0", p.i_gain0}}; }

Json to_json(const BiasConfiguration& c) {
    return {{"tau_f", c.tau_f},
            {"tau_s", c.tau_s},
            {"tau_u", c.tau_u},
            {"g_f", c.g_f},
            {"g_s", c.g_s},
            {"g_u", c.g_u},
            {"sig_f", to_json(c.sig_f)},
            {"sig_s", to_json(c.sig_s)},
            {"inactivation_enabled", c.inactivation_enabled},
            {"rectify_filter_inputs", c.rectify_filter_inputs}};
}

Json to_json(const NeuronState& s) { return {{"i_f", s.i_f}, {"i_s", s.i_s}, {"i_u", s.i_u}}; }

Json to_json(const InputSignal& in) {
    Json segs = Json::array();
    for (const auto& s : in.segments()) segs.push_back({{"start", s.start}, {"amplitude", s.amplitude}});
    return {{"segments", segs}};
}

Json to_json(const SolverOptions& o) {
    Json j = {{"dt", o.dt}, {"t_end", o.t_end}, {"record_stride", o.record_stride},
              {"initial_state", to_json(o.initial_state)}};
    j["thresholds"] = o.thresholds ? Json{{"rise", o.thresholds->rise}, {"fall", o.thresholds->fall}} : Json(nullptr);
    j["bursts"] = {{"split_factor", o.bursts.split_factor}, {"max_intra_isi", opt(o.bursts.max_intra_isi)}};
    return j;
}

Json to_json(const CurveGrid& g) { return {{"i_min", g.i_min}, {"i_max", g.i_max}, {"points", g.points}}; }

Json to_json(const SweepOptions& o) {
    return {{"param", to_string(o.param)}, {"lo", o.lo},           {"hi", o.hi},
            {"steps", o.steps},            {"simulate", o.simulate}, {"sim_duration_tau_u", o.sim_duration_tau_u}};
}

Json to_json(const FiringMetrics& m) {
    return {{"spike_rate", m.spike_rate},
            {"burst_rate", opt(m.burst_rate)},
            {"mean_spikes_per_burst", m.mean_spikes_per_burst},
            {"spikes_per_burst", m.spikes_per_burst},
            {"duty_cycle", m.duty_cycle},
            {"regime", to_string(m.regime)},
            {"window_start", m.window_start},
            {"window_end", m.window_end},
            {"spike_count", m.spike_count}};
}

Json to_json(const Burst& b) { return {{"start", b.start}, {"end", b.end}, {"spike_count", b.spike_count}}; }

Json to_json(const Window& w) { return {{"low", w.low}, {"high", w.high}}; }

Json to_json(const RegimeReport& r) {
    auto win = [](const std::optional<Window>& w) { return w ? to_json(*w) : Json(nullptr); };
    return {{"label", to_string(r.label)},
            {"fast_window", win(r.fast_window)},
            {"slow_window", win(r.slow_window)},
            {"ultraslow_monotone", r.ultraslow_monotone},
            {"rest_return_guaranteed", r.rest_return_guaranteed},
            {"fast_folds", win(r.fast_folds)},
            {"slow_folds", win(r.slow_folds)}};
}

Json to_json(const SteadyStateCurve& c) {
    Json folds = Json::array();
    for (const auto& f : c.folds) folds.push_back({{"i_bar", f.i_bar}, {"i_app", f.i_app}});
    return {{"kind", to_string(c.kind)},
            {"folds", folds},
            {"bistability_window", c.bistability_window ? to_json(*c.bistability_window) : Json(nullptr)},
            {"multi_fold", c.multi_fold}};
}

Json to_json(const SweepReport& r) {
    Json steps = Json::array();
    for (const auto& s : r.steps) {
        steps.push_back({{"value", s.value},
                         {"label", to_string(s.label)},
                         {"input", opt(s.input)},
                         {"metrics", s.metrics ? to_json(*s.metrics) : Json(nullptr)}});
    }
    auto idx = [](const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); };
    return {{"steps", steps},
            {"classifier_transition", idx(r.classifier_transition)},
            {"simulation_transition", idx(r.simulation_transition)},
            {"transition_value", opt(r.transition_value)},
            {"classifier_changes", r.classifier_changes}};
}

SigmoidParams sigmoid_from_json(const Json& j, const std::string& where) {
    Reader r(j, where);
    SigmoidParams p;
    p.i_thr = r.number("i_thr");
    p.i_lin = r.number("i_lin");
    p.i_gain0 = r.number("i_gain0");
    r.finish();
    return p;
}

BiasConfiguration config_from_json(const Json& j, const std::string& where) {
    Reader r(j, where);
    BiasConfiguration c;
    c.tau_f = r.number("tau_f");
    c.tau_s = r.number("tau_s");
    c.tau_u = r.number("tau_u");
    c.g_f = r.number("g_f", c.g_f);
    c.g_s = r.number("g_s", c.g_s);
    c.g_u = r.number("g_u", c.g_u);
    c.sig_f = sigmoid_from_json(r.raw("sig_f"), r.path("sig_f"));
    c.sig_s = sigmoid_from_json(r.raw("sig_s"), r.path("sig_s"));
    c.inactivation_enabled = r.boolean("inactivation_enabled", c.inactivation_enabled);
    c.rectify_filter_inputs = r.boolean("rectify_filter_inputs", c.rectify_filter_inputs);
    r.finish();
    return c;
}

NeuronState state_from_json(const Json& j, const std::string& where) {
    Reader r(j, where);
    NeuronState s{r.number("i_f", 0.0), r.number("i_s", 0.0), r.number("i_u", 0.0)};
    r.finish();
    return s;
}

InputSignal input_from_json(const Json& j, const std::string& where) {
    Reader r(j, where);
    const Json& arr = r.raw("segments");
    if (!arr.is_array()) throw ParseError(r.path("segments"), "expected an array");
    std::vector<InputSignal::Segment> segs;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        Reader s(arr[k], r.path("segments") + "[" + std::to_string(k) + "]");
        segs.push_back({s.number("start"), s.number("amplitude")});
        s.finish();
    }
    r.finish();
    InputSignal out;
    checked(where, [&] { out = InputSignal(std::move(segs)); });
    return out;
}

SolverOptions solver_from_json(const Json& j, const std::string& where) {
    Reader r(j, where);
    SolverOptions o;
    o.dt = r.number("dt", o.dt);
    o.t_end = r.number("t_end", o.t_end);
    o.record_stride = r.integer("record_stride", o.record_stride);
    if (r.has("initial_state")) o.initial_state = state_from_json(r.raw("initial_state"), r.path("initial_state"));
    if (r.has("thresholds") && !r.raw("thresholds").is_null()) {
        Reader t(r.raw("thresholds"), r.path("thresholds"));
        o.thresholds = SpikeThresholds{t.number("rise"), t.number("fall")};
        t.finish();
    }
    if (r.has("bursts")) {
        Reader b(r.raw("bursts"), r.path("bursts"));
        o.bursts.split_factor = b.number("split_factor", o.bursts.split_factor);
        o.bursts.max_intra_isi = b.optional_number("max_intra_isi");
        b.finish();
    }
    r.finish();
    if (o.record_stride < 1) throw ParseError(r.path("record_stride"), "must be >= 1");
    if (!(o.t_end >= 0.0)) throw ParseError(r.path("t_end"), "must be non-negative");
    return o;
}

CurveGrid grid_from_json(const Json& j, const std::string& where) {
    Reader r(j, where);
    CurveGrid g;
    g.i_min = r.number("i_min", 0.0);
    g.i_max = r.number("i_max");
    g.points = r.integer("points", g.points);
    r.finish();
    return g;
}

SweepOptions sweep_from_json(const Json& j, const std::string& where) {
    Reader r(j, where);
    SweepOptions o;
    if (r.has("param")) checked(r.path("param"), [&] { o.param = parse_sweep_param(r.string("param")); });
    o.lo = r.number("lo");
    o.hi = r.number("hi");
    o.steps = r.integer("steps", o.steps);
    o.simulate = r.boolean("simulate", o.simulate);
    o.sim_duration_tau_u = r.number("sim_duration_tau_u", o.sim_duration_tau_u);
    r.finish();
    return o;
}

Json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // Convert the byte offset into a line/column pair.
        const std::size_t pos = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
        const auto nl = text.rfind('\n', pos > 0 ? pos - 1 : 0);
        const std::size_t col = nl == std::string::npos || pos == 0 ? pos + 1 : pos - nl;
        std::ostringstream where;
        if (!source.empty()) where << source << ":";
        where << "line " << line << ", column " << col;
        throw ParseError(where.str(), "malformed JSON");
    }
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const Trace& tr) {
    os << kTraceHeader << '\n';
    std::size_t next = 0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        int mark = 0;
        while (next < tr.spikes.size() && tr.spikes[next] <= tr.t[k]) {
            mark = 1;
            ++next;
        }
        os << format_double(tr.t[k]) << ',' << format_double(tr.i_f[k]) << ',' << format_double(tr.i_s[k]) << ','
           << format_double(tr.i_u[k]) << ',' << format_double(tr.i_app[k]) << ',' << mark << '\n';
    }
}

void export_trace(const Trace& trace, const std::filesystem::path& path) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    write_text_file(path, os.str());
}

Trace read_trace_csv(std::istream& is, const BurstOptions& opts) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("line 1", "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTraceHeader) throw ParseError("line 1", "unexpected header '" + line + "'");

    Trace tr;
    std::size_t ln = 1;
    while (std::getline(is, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double v[6];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int c = 0; c < 6; ++c) {
            const auto res = std::from_chars(p, end, v[c]);
            if (res.ec != std::errc())
                throw ParseError("line " + std::to_string(ln) + ", column " + std::to_string(c + 1), "bad number");
            p = res.ptr;
            if (c < 5) {
                if (p == end || *p != ',')
                    throw ParseError("line " + std::to_string(ln), "expected 6 comma-separated fields");
                ++p;
            }
        }
        if (p != end) throw ParseError("line " + std::to_string(ln), "trailing characters");
        tr.t.push_back(v[0]);
        tr.i_f.push_back(v[1]);
        tr.i_s.push_back(v[2]);
        tr.i_u.push_back(v[3]);
        tr.i_app.push_back(v[4]);
        if (v[5] != 0.0 && v[5] != 1.0) throw ParseError("line " + std::to_string(ln) + ", column 6", "spike must be 0 or 1");
        if (v[5] == 1.0) tr.spikes.push_back(v[0]);
    }
    if (tr.size() > 1) tr.dt = tr.t[1] - tr.t[0];
    tr.bursts = segment_bursts(tr.spikes, opts);
    return tr;
}

Trace import_trace(const std::filesystem::path& path, const BurstOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return read_trace_csv(in, opts);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
    }
}

void write_curves_csv(std::ostream& os, const CurveSet& c) {
    for (const SteadyStateCurve* s : {&c.fast, &c.slow, &c.ultraslow}) {
        for (const auto& f : s->folds)
            os << "# fold," << to_string(s->kind) << ',' << format_double(f.i_bar) << ',' << format_double(f.i_app)
               << '\n';
        if (s->bistability_window)
            os << "# window," << to_string(s->kind) << ',' << format_double(s->bistability_window->low) << ','
               << format_double(s->bistability_window->high) << '\n';
    }
    os << "i_bar_A,fast_i_app_A,slow_i_app_A,ultraslow_i_app_A\n";
    for (std::size_t k = 0; k < c.fast.grid.size(); ++k)
        os << format_double(c.fast.grid[k]) << ',' << format_double(c.fast.i_app[k]) << ','
           << format_double(c.slow.i_app[k]) << ',' << format_double(c.ultraslow.i_app[k]) << '\n';
}

void export_curves(const CurveSet& curves, const std::filesystem::path& path) {
    std::ostringstream os;
    write_curves_csv(os, curves);
    write_text_file(path, os.str());
}

} // namespace mfn
