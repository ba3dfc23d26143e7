#include "mfn/analysis.hpp"

#include "mfn/error.hpp"

#include <algorithm>
#include <cmath>

namespace mfn {

namespace {

// Sigmoid values without the parameter checks; callers validate once.
double s_f(double x, const BiasConfiguration& c) {
    return c.sig_f.i_gain0 * sigma((x - c.sig_f.i_thr) / c.sig_f.i_lin);
}
double s_s(double x, const BiasConfiguration& c) {
    return c.sig_s.i_gain0 * sigma((x - c.sig_s.i_thr) / c.sig_s.i_lin);
}
double ds_f(double x, const BiasConfiguration& c) {
    return c.sig_f.i_gain0 * sigma_slope((x - c.sig_f.i_thr) / c.sig_f.i_lin) / c.sig_f.i_lin;
}
double ds_s(double x, const BiasConfiguration& c) {
    return c.sig_s.i_gain0 * sigma_slope((x - c.sig_s.i_thr) / c.sig_s.i_lin) / c.sig_s.i_lin;
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Root of f in [a, b] given a sign change; stops at `tol` or machine resolution.
template <class F>
double bisect(F&& f, double a, double b, double tol) {
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (sign(fm) == sign(fa)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

std::vector<double> sample_grid(const CurveGrid& g) {
    if (g.points < kMinCurvePoints) throw ParameterError("curve grid needs at least 256 points");
    if (!(std::isfinite(g.i_min) && std::isfinite(g.i_max)) || !(g.i_max > g.i_min) || g.i_max <= 0.0)
        throw ParameterError("curve grid must be a positive, non-empty range");
    std::vector<double> x(static_cast<std::size_t>(g.points));
    const double h = (g.i_max - g.i_min) / (g.points - 1);
    for (int k = 0; k < g.points; ++k) x[static_cast<std::size_t>(k)] = g.i_min + h * k;
    x.back() = g.i_max;
    return x;
}

std::optional<Window> mapped_window(const SteadyStateCurve& c, const SteadyStateCurve& ultraslow,
                                    std::optional<Window>& folds_out) {
    if (c.folds.size() < 2) return std::nullopt;
    const double a = c.folds.front().i_bar;
    const double b = c.folds.back().i_bar;
    folds_out = Window{a, b};
    const double ya = ultraslow.value(a);
    const double yb = ultraslow.value(b);
    return Window{std::min(ya, yb), std::max(ya, yb)};
}

} // namespace

const char* to_string(CurveKind k) noexcept {
    switch (k) {
    case CurveKind::fast: return "fast";
    case CurveKind::slow: return "slow";
    case CurveKind::ultraslow: return "ultraslow";
    }
    return "unknown";
}

const char* to_string(RegimeLabel l) noexcept {
    switch (l) {
    case RegimeLabel::resting: return "resting";
    case RegimeLabel::spiking_only: return "spiking-only";
    case RegimeLabel::bursting_capable: return "bursting-capable";
    }
    return "unknown";
}

double fast_curve(double x, const BiasConfiguration& c) { return x / c.g_f - s_f(x, c); }
double slow_curve(double x, const BiasConfiguration& c) {
    const double i_s = c.g_s * x;
    return fast_curve(x, c) + i_s - s_s(i_s, c);
}
double ultraslow_curve(double x, const BiasConfiguration& c) { return slow_curve(x, c) + c.g_u * x; }

double fast_curve_slope(double x, const BiasConfiguration& c) { return 1.0 / c.g_f - ds_f(x, c); }
double slow_curve_slope(double x, const BiasConfiguration& c) {
    return fast_curve_slope(x, c) + c.g_s * (1.0 - ds_s(c.g_s * x, c));
}
double ultraslow_curve_slope(double x, const BiasConfiguration& c) { return slow_curve_slope(x, c) + c.g_u; }

CurveGrid default_grid(const BiasConfiguration& cfg, int points) {
    const double reach_f = cfg.sig_f.i_thr + 2.0 * cfg.sig_f.i_lin;
    const double reach_s = (cfg.sig_s.i_thr + 2.0 * cfg.sig_s.i_lin) / cfg.g_s;
    // The fast curve can only fold while the sigmoid output is still rising.
    const double reach_g = cfg.g_f * (cfg.sig_f.i_gain0 + cfg.sig_s.i_gain0);
    return {0.0, 2.0 * std::max({reach_f, reach_s, reach_g}), points};
}

SteadyStateCurve make_curve(CurveKind kind, const CurveGrid& grid, std::function<double(double)> value,
                            std::function<double(double)> slope) {
    SteadyStateCurve c;
    c.kind = kind;
    c.grid = sample_grid(grid);
    c.i_app.resize(c.grid.size());
    for (std::size_t k = 0; k < c.grid.size(); ++k) c.i_app[k] = value(c.grid[k]);
    c.value = std::move(value);
    c.slope = std::move(slope);
    find_folds(c);
    return c;
}

CurveSet steady_state_curves(const BiasConfiguration& cfg, const CurveGrid& grid) {
    validate(cfg);
    return {make_curve(CurveKind::fast, grid, [cfg](double x) { return fast_curve(x, cfg); },
                       [cfg](double x) { return fast_curve_slope(x, cfg); }),
            make_curve(CurveKind::slow, grid, [cfg](double x) { return slow_curve(x, cfg); },
                       [cfg](double x) { return slow_curve_slope(x, cfg); }),
            make_curve(CurveKind::ultraslow, grid, [cfg](double x) { return ultraslow_curve(x, cfg); },
                       [cfg](double x) { return ultraslow_curve_slope(x, cfg); })};
}

CurveSet steady_state_curves(const BiasConfiguration& cfg) { return steady_state_curves(cfg, default_grid(cfg)); }

void find_folds(SteadyStateCurve& c) {
    c.folds.clear();
    c.bistability_window.reset();
    c.multi_fold = false;
    const std::size_t n = c.grid.size();
    if (n < 3 || c.i_app.size() != n) throw InputError("curve samples do not match the grid");
    for (std::size_t k = 1; k < n; ++k)
        if (!(c.grid[k] > c.grid[k - 1])) throw InputError("curve grid must be strictly ascending");

    // Central differences on the interior, one-sided at the ends.
    std::vector<double> d(n);
    d[0] = c.i_app[1] - c.i_app[0];
    d[n - 1] = c.i_app[n - 1] - c.i_app[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = c.i_app[k + 1] - c.i_app[k - 1];

    const double step = (c.grid.back() - c.grid.front()) / static_cast<double>(n - 1);
    int prev_sign = 0;
    std::size_t prev_k = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const int s = sign(d[k]);
        if (s == 0) continue;
        if (prev_sign != 0 && s != prev_sign) {
            double a = c.grid[prev_k > 0 ? prev_k - 1 : 0];
            double b = c.grid[std::min(k + 1, n - 1)];
            double x;
            if (c.slope && sign(c.slope(a)) != sign(c.slope(b)) && sign(c.slope(a)) != 0)
                x = bisect(c.slope, a, b, step * 1e-12);
            else
                x = 0.5 * (c.grid[prev_k] + c.grid[k]);
            const double y = c.value ? c.value(x) : c.i_app[k];
            c.folds.push_back({x, y});
        }
        prev_sign = s;
        prev_k = k;
    }
    c.multi_fold = c.folds.size() > 2;
    if (c.folds.size() >= 2) {
        const double ya = c.folds.front().i_app;
        const double yb = c.folds.back().i_app;
        c.bistability_window = Window{std::min(ya, yb), std::max(ya, yb)};
    }
}

RegimeReport classify_regime(const SteadyStateCurve& fast, const SteadyStateCurve& slow,
                             const SteadyStateCurve& ultraslow) {
    if (fast.grid != slow.grid || fast.grid != ultraslow.grid) throw InputError("curves sampled on different grids");
    if (!ultraslow.value) throw InputError("ultraslow curve has no analytic expression");

    RegimeReport r;
    r.fast_window = mapped_window(fast, ultraslow, r.fast_folds);
    r.slow_window = mapped_window(slow, ultraslow, r.slow_folds);

    bool mono = ultraslow.folds.empty();
    for (std::size_t k = 0; mono && k < ultraslow.grid.size(); ++k) {
        const double s = ultraslow.slope ? ultraslow.slope(ultraslow.grid[k])
                                         : (k > 0 ? ultraslow.i_app[k] - ultraslow.i_app[k - 1] : 1.0);
        mono = s > 0.0;
    }
    r.ultraslow_monotone = mono;
    r.rest_return_guaranteed = mono;

    if (!r.fast_window)
        r.label = RegimeLabel::resting;
    else if (r.slow_window && r.slow_window->low < r.fast_window->low)
        r.label = RegimeLabel::bursting_capable;
    else
        r.label = RegimeLabel::spiking_only;
    return r;
}

RegimeReport classify_regime(const CurveSet& c) { return classify_regime(c.fast, c.slow, c.ultraslow); }

RegimeReport classify(const BiasConfiguration& cfg) { return classify_regime(steady_state_curves(cfg)); }

std::optional<double> confirmation_input(const RegimeReport& r, const BiasConfiguration& cfg) {
    if (r.label == RegimeLabel::resting || !r.fast_folds) return std::nullopt;
    const Window f = *r.fast_folds;
    double x;
    if (r.label == RegimeLabel::bursting_capable && r.slow_folds) {
        const double a = r.slow_folds->low;
        const double b = std::min(r.slow_folds->high, f.low);
        x = 0.5 * (a + b);
    } else {
        x = f.low + 0.1 * f.width();
    }
    const double i = ultraslow_curve(x, cfg);
    if (!(i > 0.0)) return std::nullopt;
    return i;
}

std::vector<Equilibrium> equilibria(const BiasConfiguration& cfg, double i_app, EquilibriumLevel level,
                                    double i_u_frozen) {
    validate(cfg);
    const bool full = level == EquilibriumLevel::full;
    const double target = full ? i_app : i_app - i_u_frozen;
    auto f = [&](double x) { return (full ? ultraslow_curve(x, cfg) : slow_curve(x, cfg)) - target; };
    auto df = [&](double x) { return full ? ultraslow_curve_slope(x, cfg) : slow_curve_slope(x, cfg); };

    const CurveGrid g = default_grid(cfg);
    const double span = g.i_max - g.i_min;
    double lo = g.i_min;
    double hi = g.i_max;
    // Outside the sigmoid ranges the curves are linear and increasing.
    for (int k = 0; k < 64 && f(hi) <= 0.0; ++k) hi += span * (1 << std::min(k, 20));
    for (int k = 0; k < 64 && f(lo) >= 0.0; ++k) lo -= span * (1 << std::min(k, 20));

    constexpr int n = 20000;
    const double h = (hi - lo) / n;
    std::vector<double> roots;
    double xa = lo;
    double fa = f(xa);
    for (int k = 1; k <= n; ++k) {
        const double xb = k == n ? hi : lo + h * k;
        const double fb = f(xb);
        if (fa == 0.0)
            roots.push_back(xa);
        else if (sign(fa) * sign(fb) < 0)
            roots.push_back(bisect(f, xa, xb, 0.0));
        xa = xb;
        fa = fb;
    }
    if (fa == 0.0) roots.push_back(xa);

    std::vector<Equilibrium> out;
    for (double x : roots) {
        Equilibrium e;
        e.state = {x, cfg.g_s * x, full ? cfg.g_u * x : i_u_frozen};
        e.stable = df(x) > 0.0;
        out.push_back(e);
    }
    return out;
}

const char* to_string(SweepParam p) noexcept {
    switch (p) {
    case SweepParam::sig_s_gain: return "sig_s.i_gain0";
    case SweepParam::sig_f_gain: return "sig_f.i_gain0";
    case SweepParam::sig_s_thr: return "sig_s.i_thr";
    case SweepParam::sig_f_thr: return "sig_f.i_thr";
    case SweepParam::g_s: return "g_s";
    case SweepParam::g_u: return "g_u";
    }
    return "unknown";
}

SweepParam parse_sweep_param(const std::string& name) {
    for (auto p : {SweepParam::sig_s_gain, SweepParam::sig_f_gain, SweepParam::sig_s_thr, SweepParam::sig_f_thr,
                   SweepParam::g_s, SweepParam::g_u})
        if (name == to_string(p)) return p;
    throw ParameterError("unknown sweep parameter '" + name + "'");
}

double get_param(const BiasConfiguration& c, SweepParam p) {
    switch (p) {
    case SweepParam::sig_s_gain: return c.sig_s.i_gain0;
    case SweepParam::sig_f_gain: return c.sig_f.i_gain0;
    case SweepParam::sig_s_thr: return c.sig_s.i_thr;
    case SweepParam::sig_f_thr: return c.sig_f.i_thr;
    case SweepParam::g_s: return c.g_s;
    case SweepParam::g_u: return c.g_u;
    }
    return 0.0;
}

void set_param(BiasConfiguration& c, SweepParam p, double v) {
    switch (p) {
    case SweepParam::sig_s_gain: c.sig_s.i_gain0 = v; break;
    case SweepParam::sig_f_gain: c.sig_f.i_gain0 = v; break;
    case SweepParam::sig_s_thr: c.sig_s.i_thr = v; break;
    case SweepParam::sig_f_thr: c.sig_f.i_thr = v; break;
    case SweepParam::g_s: c.g_s = v; break;
    case SweepParam::g_u: c.g_u = v; break;
    }
}

SweepReport neuromod_sweep(const BiasConfiguration& cfg, const SweepOptions& opts) {
    if (opts.steps < kMinSweepSteps) throw ParameterError("sweep needs at least 8 steps");
    if (!(std::isfinite(opts.lo) && std::isfinite(opts.hi)) || opts.lo < 0.0 || !(opts.hi > opts.lo))
        throw ParameterError("sweep range must satisfy 0 <= lo < hi");
    if (!(opts.sim_duration_tau_u > kTransientUltraslowMultiple))
        throw ParameterError("confirmation run must outlast the transient");

    SweepReport rep;
    rep.steps.resize(static_cast<std::size_t>(opts.steps));
    const bool geometric = opts.lo > 0.0;
    for (int k = 0; k < opts.steps; ++k) {
        const double u = static_cast<double>(k) / (opts.steps - 1);
        SweepStep& st = rep.steps[static_cast<std::size_t>(k)];
        st.value = geometric ? opts.lo * std::pow(opts.hi / opts.lo, u) : opts.lo + u * (opts.hi - opts.lo);
        if (k == opts.steps - 1) st.value = opts.hi;

        BiasConfiguration c = cfg;
        set_param(c, opts.param, st.value);
        const RegimeReport r = classify(c);
        st.label = r.label;
        st.input = confirmation_input(r, c);
        if (opts.simulate && st.input) {
            SolverOptions so;
            so.t_end = opts.sim_duration_tau_u * c.tau_u;
            const Trace tr = integrate(c, InputSignal::constant(*st.input), so);
            st.metrics = firing_metrics(tr, c);
        }
    }

    auto first_rise = [&](auto&& is_burst) -> std::optional<int> {
        for (int k = 1; k < opts.steps; ++k)
            if (is_burst(k) && !is_burst(k - 1)) return k;
        return std::nullopt;
    };
    auto cls = [&](int k) { return rep.steps[static_cast<std::size_t>(k)].label == RegimeLabel::bursting_capable; };
    auto sim = [&](int k) {
        const auto& m = rep.steps[static_cast<std::size_t>(k)].metrics;
        return m && m->regime == FiringRegime::bursting;
    };
    rep.classifier_transition = first_rise(cls);
    if (opts.simulate) rep.simulation_transition = first_rise(sim);
    if (rep.classifier_transition)
        rep.transition_value = rep.steps[static_cast<std::size_t>(*rep.classifier_transition)].value;
    for (int k = 1; k < opts.steps; ++k) rep.classifier_changes += cls(k) != cls(k - 1);
    return rep;
}

} // namespace mfn
