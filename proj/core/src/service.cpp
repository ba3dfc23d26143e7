#include "mfn/service.hpp"

#include "mfn/analysis.hpp"
#include "mfn/dynamics.hpp"
#include "mfn/error.hpp"
#include "mfn/presets.hpp"

#include <httplib.h>

#include <algorithm>
#include <iostream>
#include <set>

namespace mfn {

namespace {

Response error(int status, const std::string& msg, Json details = nullptr) {
    Json b = {{"error", msg}};
    if (!details.is_null()) b["details"] = std::move(details);
    return {status, b};
}

void allow_keys(const Json& j, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ParseError("", "request body must be an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ParseError(it.key(), "unknown key");
}

BiasConfiguration request_cfg(const Json& j) {
    if (j.contains("preset")) {
        if (j.contains("cfg")) throw ParseError("preset", "give either cfg or preset, not both");
        if (!j["preset"].is_string()) throw ParseError("preset", "expected a string");
        const auto p = find_preset(j["preset"].get<std::string>());
        if (!p) throw ParseError("preset", "unknown preset");
        return p->cfg;
    }
    if (!j.contains("cfg")) throw ParseError("cfg", "missing field");
    return config_from_json(j["cfg"], "cfg");
}

// 422 with validator messages, or empty when the configuration is usable.
std::optional<Response> invalid_cfg(const BiasConfiguration& cfg) {
    try {
        validate(cfg);
    } catch (const ParameterError& e) {
        return error(422, "invalid bias configuration", Json::array({e.what()}));
    }
    return std::nullopt;
}

template <class F>
Response guarded(F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        return error(400, e.what());
    } catch (const InputError& e) {
        return error(400, e.what());
    } catch (const ParameterError& e) {
        return error(422, e.what(), Json::array({e.what()}));
    } catch (const IntegrationDiverged& e) {
        return error(500, e.what(), Json{{"time", e.time()}});
    } catch (const Error& e) {
        return error(500, e.what());
    }
}

CurveGrid request_grid(const Json& j, const BiasConfiguration& cfg, const ServiceLimits& lim) {
    if (j.contains("grid")) return grid_from_json(j["grid"], "grid");
    return default_grid(cfg, lim.default_grid_points);
}

} // namespace

std::vector<std::size_t> minmax_decimate(const std::vector<double>& y, std::size_t max_points) {
    const std::size_t n = y.size();
    std::vector<std::size_t> keep;
    if (n <= max_points || max_points < 4) {
        keep.resize(n);
        for (std::size_t k = 0; k < n; ++k) keep[k] = k;
        return keep;
    }
    const std::size_t buckets = (max_points - 2) / 2;
    keep.push_back(0);
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t lo = 1 + b * (n - 2) / buckets;
        const std::size_t hi = 1 + (b + 1) * (n - 2) / buckets;
        if (lo >= hi) continue;
        const auto [mn, mx] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(lo),
                                                  y.begin() + static_cast<std::ptrdiff_t>(hi));
        std::size_t a = static_cast<std::size_t>(mn - y.begin());
        std::size_t c = static_cast<std::size_t>(mx - y.begin());
        if (a > c) std::swap(a, c);
        keep.push_back(a);
        if (c != a) keep.push_back(c);
    }
    keep.push_back(n - 1);
    return keep;
}

Response handle_simulate(const Json& req, const ServiceLimits& lim) {
    return guarded([&]() -> Response {
        allow_keys(req, {"cfg", "preset", "input", "solver", "decimation"});
        const BiasConfiguration cfg = request_cfg(req);
        SolverOptions so;
        so.t_end = std::min(9.0 * cfg.tau_u, lim.max_t_end);
        if (req.contains("solver")) so = solver_from_json(req["solver"], "solver");
        if (so.t_end > lim.max_t_end)
            return error(400, "t_end " + format_double(so.t_end) + " s exceeds the cap of " +
                                  format_double(lim.max_t_end) + " s");
        std::size_t max_points = lim.max_points;
        if (req.contains("decimation")) {
            const Json& d = req["decimation"];
            allow_keys(d, {"max_points"});
            if (d.contains("max_points")) {
                const Json& mp = d["max_points"];
                if (!mp.is_number_integer() || mp.get<long long>() < 1)
                    throw ParseError("decimation.max_points", "expected a positive integer");
                max_points = std::min<std::size_t>(mp.get<std::size_t>(), lim.max_points);
            }
        }
        if (auto bad = invalid_cfg(cfg)) return *bad;

        InputSignal in;
        if (req.contains("input")) {
            in = input_from_json(req["input"], "input");
        } else {
            const auto i = confirmation_input(classify(cfg), cfg);
            in = InputSignal::constant(i.value_or(0.0));
        }
        const Trace tr = integrate(cfg, in, so);
        Json metrics = nullptr;
        if (tr.size() > 1) {
            MetricsOptions mo;
            mo.window_start = std::min(kTransientUltraslowMultiple * cfg.tau_u, 0.5 * tr.t.back());
            mo.bursts = so.bursts;
            metrics = to_json(firing_metrics(tr, mo));
        }

        const auto keep = minmax_decimate(tr.i_f, max_points);
        Json t = Json::array(), f = Json::array(), s = Json::array(), u = Json::array(), a = Json::array();
        for (std::size_t k : keep) {
            t.push_back(tr.t[k]);
            f.push_back(tr.i_f[k]);
            s.push_back(tr.i_s[k]);
            u.push_back(tr.i_u[k]);
            a.push_back(tr.i_app[k]);
        }
        Json bursts = Json::array();
        for (const auto& b : tr.bursts) bursts.push_back(to_json(b));
        return {200,
                {{"trace", {{"t", t}, {"i_f", f}, {"i_s", s}, {"i_u", u}, {"i_app", a}}},
                 {"spikes", tr.spikes},
                 {"bursts", bursts},
                 {"metrics", metrics},
                 {"input", to_json(in)},
                 {"dt", tr.dt},
                 {"warnings", tr.warnings}}};
    });
}

Response handle_curves(const Json& req, const ServiceLimits& lim) {
    return guarded([&]() -> Response {
        allow_keys(req, {"cfg", "preset", "grid"});
        const BiasConfiguration cfg = request_cfg(req);
        if (auto bad = invalid_cfg(cfg)) return *bad;
        const CurveSet cs = steady_state_curves(cfg, request_grid(req, cfg, lim));
        Json body = {{"grid", cs.fast.grid}};
        for (const SteadyStateCurve* c : {&cs.fast, &cs.slow, &cs.ultraslow}) {
            Json cj = to_json(*c);
            cj["i_app"] = c->i_app;
            body[to_string(c->kind)] = cj;
        }
        body["report"] = to_json(classify_regime(cs));
        return {200, body};
    });
}

Response handle_classify(const Json& req, const ServiceLimits& lim) {
    return guarded([&]() -> Response {
        allow_keys(req, {"cfg", "preset", "grid"});
        const BiasConfiguration cfg = request_cfg(req);
        if (auto bad = invalid_cfg(cfg)) return *bad;
        const RegimeReport r = classify_regime(steady_state_curves(cfg, request_grid(req, cfg, lim)));
        Json body = to_json(r);
        const auto i = confirmation_input(r, cfg);
        body["confirmation_input"] = i ? Json(*i) : Json(nullptr);
        return {200, body};
    });
}

Response list_presets() {
    Json arr = Json::array();
    for (const auto& p : presets())
        arr.push_back({{"name", p.name}, {"description", p.description}, {"cfg", to_json(p.cfg)}, {"i_app", p.i_app}});
    return {200, {{"presets", arr}}};
}

Response dispatch(const std::string& route, const std::string& body, const ServiceLimits& lim) {
    if (route == "/api/presets") return list_presets();
    Json req;
    try {
        req = parse_json_text(body.empty() ? "{}" : body);
    } catch (const ParseError& e) {
        return error(400, e.what());
    }
    if (route == "/api/simulate") return handle_simulate(req, lim);
    if (route == "/api/curves") return handle_curves(req, lim);
    if (route == "/api/classify") return handle_classify(req, lim);
    return error(404, "no such endpoint");
}

const std::string& index_page() {
    static const std::string page = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>mixed-feedback neuron workbench</title></head>
<body>
<h1>Mixed-feedback neuron</h1>
<p>The interactive workbench is not bundled with this build. The JSON API is live:</p>
<ul>
<li><code>GET /api/presets</code></li>
<li><code>POST /api/simulate</code> {cfg | preset, input, solver, decimation}</li>
<li><code>POST /api/curves</code> {cfg | preset, grid}</li>
<li><code>POST /api/classify</code> {cfg | preset, grid}</li>
</ul>
</body></html>
)";
    return page;
}

bool serve(const std::string& host, int port, const ServiceLimits& lim) {
    httplib::Server srv;
    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(index_page(), "text/html"); });
    srv.Get("/api/presets", [&](const httplib::Request&, httplib::Response& res) { reply(res, list_presets()); });
    for (const char* route : {"/api/simulate", "/api/curves", "/api/classify"}) {
        const std::string r = route;
        srv.Post(route, [&, r](const httplib::Request& req, httplib::Response& res) {
            reply(res, dispatch(r, req.body, lim));
        });
    }
    if (!srv.bind_to_port(host, port)) return false;
    std::cerr << "listening on http://" << host << ":" << port << "\n";
    return srv.listen_after_bind();
}

} // namespace mfn
