#include "mfn/dynamics.hpp"

#include "mfn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mfn {

namespace {

NeuronState axpy(const NeuronState& x, double h, const StateRate& k) noexcept {
    return {x.i_f + h * k.i_f, x.i_s + h * k.i_s, x.i_u + h * k.i_u};
}

bool finite(const NeuronState& s) noexcept {
    return std::isfinite(s.i_f) && std::isfinite(s.i_s) && std::isfinite(s.i_u);
}

NeuronState rk4_step(const NeuronState& x, double i_app, double h, const BiasConfiguration& cfg) {
    const StateRate k1 = vector_field(x, i_app, cfg);
    const StateRate k2 = vector_field(axpy(x, 0.5 * h, k1), i_app, cfg);
    const StateRate k3 = vector_field(axpy(x, 0.5 * h, k2), i_app, cfg);
    const StateRate k4 = vector_field(axpy(x, h, k3), i_app, cfg);
    const double w = h / 6.0;
    return {x.i_f + w * (k1.i_f + 2.0 * k2.i_f + 2.0 * k3.i_f + k4.i_f),
            x.i_s + w * (k1.i_s + 2.0 * k2.i_s + 2.0 * k3.i_s + k4.i_s),
            x.i_u + w * (k1.i_u + 2.0 * k2.i_u + 2.0 * k3.i_u + k4.i_u)};
}

class Detector {
public:
    explicit Detector(const SpikeThresholds& th) : th_(th) {}

    // True when `v` completes an upward crossing of the rise level.
    bool feed(double v) noexcept {
        if (armed_ && v > th_.rise) {
            armed_ = false;
            return true;
        }
        if (!armed_ && v < th_.fall) armed_ = true;
        return false;
    }

private:
    SpikeThresholds th_;
    bool armed_ = true;
};

void check_thresholds(const SpikeThresholds& th) {
    if (!(std::isfinite(th.rise) && std::isfinite(th.fall)) || !(th.fall > 0.0) || th.fall >= th.rise)
        throw ParameterError("spike thresholds need 0 < fall < rise");
}

} // namespace

const char* to_string(FiringRegime r) noexcept {
    switch (r) {
    case FiringRegime::quiescent: return "quiescent";
    case FiringRegime::tonic_spiking: return "tonic_spiking";
    case FiringRegime::bursting: return "bursting";
    }
    return "unknown";
}

std::optional<SpikeThresholds> default_thresholds(const BiasConfiguration& cfg) {
    const double g = cfg.sig_f.i_gain0;
    if (!(g > 0.0)) return std::nullopt;
    return SpikeThresholds{kDefaultRiseFraction * g, kDefaultFallFraction * g};
}

double resolve_step(const BiasConfiguration& cfg, const SolverOptions& opts, std::vector<std::string>* warnings) {
    const double fallback = cfg.tau_f / kDefaultStepFraction;
    if (!std::isfinite(opts.dt)) throw ParameterError("dt must be finite");
    if (opts.dt <= 0.0) return fallback;
    if (opts.dt > cfg.tau_f / kMaxStepFraction) {
        if (warnings) {
            std::ostringstream os;
            os << "dt " << opts.dt << " s exceeds tau_f/" << kMaxStepFraction << "; using " << fallback << " s";
            warnings->push_back(os.str());
        }
        return fallback;
    }
    return opts.dt;
}

Trace integrate(const BiasConfiguration& cfg, const InputSignal& input, const SolverOptions& opts) {
    Trace tr;
    tr.warnings = validate(cfg);
    if (!(std::isfinite(opts.t_end) && opts.t_end >= 0.0)) throw ParameterError("t_end must be non-negative");
    if (opts.record_stride < 1) throw ParameterError("record_stride must be >= 1");
    if (!finite(opts.initial_state)) throw ParameterError("initial state must be finite");

    const double dt = resolve_step(cfg, opts, &tr.warnings);
    tr.dt = dt;
    const auto n_steps = static_cast<long long>(std::llround(opts.t_end / dt));

    // Segment boundaries snapped to the step grid; input is held over each step.
    const auto& segs = input.segments();
    std::vector<long long> seg_step(segs.size());
    for (std::size_t j = 0; j < segs.size(); ++j) seg_step[j] = std::llround(segs[j].start / dt);
    std::size_t seg = 0;
    bool seg_active = false;
    auto input_at_step = [&](long long k) {
        while (seg < segs.size() && seg_step[seg] <= k) {
            ++seg;
            seg_active = true;
        }
        return seg_active ? segs[seg - 1].amplitude : 0.0;
    };

    std::optional<SpikeThresholds> th = opts.thresholds ? opts.thresholds : default_thresholds(cfg);
    if (th) check_thresholds(*th);
    std::optional<Detector> det;
    if (th) det.emplace(*th);

    const std::size_t n_rec = static_cast<std::size_t>(n_steps / opts.record_stride) + 1;
    for (auto* v : {&tr.t, &tr.i_f, &tr.i_s, &tr.i_u, &tr.i_app}) v->reserve(n_rec);

    NeuronState x = opts.initial_state;
    double u = input_at_step(0);
    auto record = [&](long long k) {
        tr.t.push_back(static_cast<double>(k) * dt);
        tr.i_f.push_back(x.i_f);
        tr.i_s.push_back(x.i_s);
        tr.i_u.push_back(x.i_u);
        tr.i_app.push_back(u);
    };
    record(0);
    if (det) det->feed(x.i_f);

    for (long long k = 0; k < n_steps; ++k) {
        u = input_at_step(k);
        x = rk4_step(x, u, dt, cfg);
        const double t_next = static_cast<double>(k + 1) * dt;
        if (!finite(x)) throw IntegrationDiverged(t_next, "state became non-finite");
        if (det && det->feed(x.i_f)) tr.spikes.push_back(t_next);
        if ((k + 1) % opts.record_stride == 0) {
            u = input_at_step(k + 1);
            record(k + 1);
        }
    }
    tr.bursts = segment_bursts(tr.spikes, opts.bursts);
    return tr;
}

std::vector<double> detect_spikes(const Trace& trace, const SpikeThresholds& thresholds) {
    check_thresholds(thresholds);
    Detector det(thresholds);
    std::vector<double> out;
    for (std::size_t k = 0; k < trace.size(); ++k)
        if (det.feed(trace.i_f[k]) && k > 0) out.push_back(trace.t[k]);
    return out;
}

std::vector<Burst> segment_bursts(const std::vector<double>& spike_times, const BurstOptions& opts) {
    std::vector<Burst> out;
    if (spike_times.size() < 3) return out;

    std::vector<double> isi(spike_times.size() - 1);
    for (std::size_t k = 0; k + 1 < spike_times.size(); ++k) isi[k] = spike_times[k + 1] - spike_times[k];

    double split = 0.0;
    if (opts.max_intra_isi) {
        if (!(*opts.max_intra_isi > 0.0)) throw ParameterError("max_intra_isi must be positive");
        split = *opts.max_intra_isi;
    } else {
        // Largest gap in sorted log-ISIs separates intra- from inter-burst intervals.
        std::vector<double> l(isi.size());
        std::transform(isi.begin(), isi.end(), l.begin(), [](double v) { return std::log(std::max(v, 1e-300)); });
        std::sort(l.begin(), l.end());
        std::size_t gap = 0;
        double widest = -1.0;
        for (std::size_t k = 0; k + 1 < l.size(); ++k) {
            if (l[k + 1] - l[k] > widest) {
                widest = l[k + 1] - l[k];
                gap = k;
            }
        }
        if (widest <= 0.0) return out;
        auto mean_exp = [&](std::size_t b, std::size_t e) {
            double s = 0.0;
            for (std::size_t k = b; k < e; ++k) s += std::exp(l[k]);
            return s / static_cast<double>(e - b);
        };
        const double short_mean = mean_exp(0, gap + 1);
        const double long_mean = mean_exp(gap + 1, l.size());
        if (long_mean < opts.split_factor * short_mean) return out;
        split = std::exp(0.5 * (l[gap] + l[gap + 1]));
    }

    std::size_t first = 0;
    auto close = [&](std::size_t last) {
        const auto count = static_cast<int>(last - first + 1);
        if (count >= 2) out.push_back({spike_times[first], spike_times[last], count});
    };
    for (std::size_t k = 0; k < isi.size(); ++k) {
        if (isi[k] > split) {
            close(k);
            first = k + 1;
        }
    }
    close(spike_times.size() - 1);
    return out;
}

FiringMetrics firing_metrics(const Trace& trace, const MetricsOptions& opts) {
    if (trace.empty()) throw WindowError("empty trace");
    const double t0 = opts.window_start;
    const double t1 = opts.window_end.value_or(trace.t.back());
    if (!(t0 >= trace.t.front() && t1 <= trace.t.back() && t1 > t0))
        throw WindowError("metrics window outside the trace");

    FiringMetrics m;
    m.window_start = t0;
    m.window_end = t1;
    std::vector<double> s;
    for (double t : trace.spikes)
        if (t >= t0 && t <= t1) s.push_back(t);
    m.spike_count = s.size();
    const double span = t1 - t0;
    m.spike_rate = static_cast<double>(s.size()) / span;

    const auto bursts = segment_bursts(s, opts.bursts);
    double in_burst = 0.0;
    for (const auto& b : bursts) {
        m.spikes_per_burst.push_back(b.spike_count);
        in_burst += b.end - b.start;
    }
    if (!bursts.empty()) {
        m.mean_spikes_per_burst =
            std::accumulate(m.spikes_per_burst.begin(), m.spikes_per_burst.end(), 0.0) / bursts.size();
        m.duty_cycle = in_burst / span;
    }
    if (bursts.size() >= 2)
        m.burst_rate = static_cast<double>(bursts.size() - 1) / (bursts.back().start - bursts.front().start);

    if (s.empty())
        m.regime = FiringRegime::quiescent;
    else if (bursts.size() >= 2)
        m.regime = FiringRegime::bursting;
    else
        m.regime = FiringRegime::tonic_spiking;
    return m;
}

FiringMetrics firing_metrics(const Trace& trace, const BiasConfiguration& cfg) {
    MetricsOptions o;
    o.window_start = (trace.empty() ? 0.0 : trace.t.front()) + kTransientUltraslowMultiple * cfg.tau_u;
    return firing_metrics(trace, o);
}

std::vector<EventExtent> spike_extents(const Trace& trace, const SpikeThresholds& thresholds, double window_start) {
    check_thresholds(thresholds);
    std::vector<EventExtent> out;
    bool above = false;
    bool crossed = false;
    double start = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double t = trace.t[k];
        const double v = trace.i_f[k];
        if (t < window_start) continue;
        if (!above && v > thresholds.fall) {
            // An excursion already in progress at the window start is skipped.
            above = true;
            crossed = false;
            start = (k > 0 && trace.t[k - 1] >= window_start) ? t : -1.0;
        }
        if (above) {
            if (v > thresholds.rise) crossed = true;
            if (v <= thresholds.fall) {
                if (crossed && start >= 0.0) out.push_back({start, t});
                above = false;
            }
        }
    }
    return out;
}

std::vector<double> burst_durations(const Trace& trace, const SpikeThresholds& thresholds, double window_start,
                                    const BurstOptions& opts) {
    const auto ext = spike_extents(trace, thresholds, window_start);
    std::vector<double> peaks;
    for (double t : trace.spikes)
        if (t >= window_start) peaks.push_back(t);
    const auto bursts = segment_bursts(peaks, opts);

    std::vector<double> out;
    for (const auto& b : bursts) {
        const EventExtent* first = nullptr;
        const EventExtent* last = nullptr;
        for (const auto& e : ext) {
            if (!first && e.end >= b.start) first = &e;
            if (e.start <= b.end) last = &e;
        }
        // Bursts cut by the end of the trace have no closing extent.
        if (first && last && last->end >= b.end && first->start <= b.start) out.push_back(last->end - first->start);
    }
    return out;
}

} // namespace mfn
