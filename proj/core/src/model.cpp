#include "mfn/model.hpp"

#include "mfn/error.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

namespace mfn {

InputSignal::InputSignal(std::vector<Segment> segments) : segments_(std::move(segments)) {
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const auto& s = segments_[k];
        if (!std::isfinite(s.start) || !std::isfinite(s.amplitude))
            throw ParameterError("input segment " + std::to_string(k) + " is not finite");
        if (s.amplitude < 0.0)
            throw ParameterError("input segment " + std::to_string(k) + " has a negative amplitude");
        if (k > 0 && !(s.start > segments_[k - 1].start))
            throw ParameterError("input segment start times must be strictly increasing");
    }
}

InputSignal InputSignal::constant(double amplitude) {
    return InputSignal({{0.0, amplitude}});
}

InputSignal InputSignal::staircase(const std::vector<double>& amplitudes, double level_duration) {
    if (!(level_duration > 0.0))
        throw ParameterError("staircase level duration must be positive");
    std::vector<Segment> segs;
    segs.reserve(amplitudes.size());
    for (std::size_t k = 0; k < amplitudes.size(); ++k)
        segs.push_back({static_cast<double>(k) * level_duration, amplitudes[k]});
    return InputSignal(std::move(segs));
}

double InputSignal::at(double t) const {
    // last segment whose start is <= t
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment& s) { return v < s.start; });
    if (it == segments_.begin())
        return 0.0;
    return std::prev(it)->amplitude;
}

double InputSignal::max_amplitude() const noexcept {
    double m = 0.0;
    for (const auto& s : segments_)
        m = std::max(m, s.amplitude);
    return m;
}

double sigma(double x) noexcept {
    const double z = kSigmoidSteepness * (x - 0.5);
    // symmetric form avoids overflow of exp for large |z|
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double sigma_slope(double x) noexcept {
    const double s = sigma(x);
    return kSigmoidSteepness * s * (1.0 - s);
}

void validate(const SigmoidParams& p, const std::string& name) {
    if (!std::isfinite(p.i_thr) || !std::isfinite(p.i_lin) || !std::isfinite(p.i_gain0))
        throw ParameterError(name + ": parameters must be finite");
    if (!(p.i_lin > 0.0))
        throw ParameterError(name + ".i_lin must be positive");
    if (p.i_thr < 0.0)
        throw ParameterError(name + ".i_thr must be non-negative");
    if (p.i_gain0 < 0.0)
        throw ParameterError(name + ".i_gain0 must be non-negative");
}

double sigmoid_eval(double i_in, const SigmoidParams& p, double i_gain_effective) {
    if (!(p.i_lin > 0.0))
        throw ParameterError("sigmoid i_lin must be positive");
    if (i_gain_effective < 0.0)
        throw ParameterError("sigmoid gain must be non-negative");
    return i_gain_effective * sigma((i_in - p.i_thr) / p.i_lin);
}

double sigmoid_slope(double i_in, const SigmoidParams& p, double i_gain_effective) {
    if (!(p.i_lin > 0.0))
        throw ParameterError("sigmoid i_lin must be positive");
    return i_gain_effective * sigma_slope((i_in - p.i_thr) / p.i_lin) / p.i_lin;
}

EffectiveGains effective_gains(const NeuronState& state, const BiasConfiguration& cfg) noexcept {
    if (!cfg.inactivation_enabled)
        return {cfg.sig_f.i_gain0, cfg.sig_s.i_gain0};
    return {std::max(0.0, cfg.sig_f.i_gain0 - state.i_s),
            std::max(0.0, cfg.sig_s.i_gain0 - state.i_u)};
}

double fast_filter_input(const NeuronState& state, double i_app, const BiasConfiguration& cfg) {
    const auto g = effective_gains(state, cfg);
    return sigmoid_eval(state.i_f, cfg.sig_f, g.i_gf) + sigmoid_eval(state.i_s, cfg.sig_s, g.i_gs) -
           state.i_s - state.i_u + i_app;
}

StateRate vector_field(const NeuronState& state, double i_app, const BiasConfiguration& cfg) {
    double u = fast_filter_input(state, i_app, cfg);
    if (cfg.rectify_filter_inputs)
        u = std::max(0.0, u);
    return {(-state.i_f + cfg.g_f * u) / cfg.tau_f,
            (-state.i_s + cfg.g_s * state.i_f) / cfg.tau_s,
            (-state.i_u + cfg.g_u * state.i_f) / cfg.tau_u};
}

std::vector<std::string> validate(const BiasConfiguration& cfg) {
    const double taus[] = {cfg.tau_f, cfg.tau_s, cfg.tau_u};
    const double gains[] = {cfg.g_f, cfg.g_s, cfg.g_u};
    for (double v : taus)
        if (!std::isfinite(v) || !(v > 0.0))
            throw ParameterError("time constants must be positive and finite");
    if (!(cfg.tau_f < cfg.tau_s && cfg.tau_s < cfg.tau_u))
        throw ParameterError("time constants must satisfy tau_f < tau_s < tau_u");
    for (double v : gains)
        if (!std::isfinite(v) || !(v > 0.0))
            throw ParameterError("filter gains must be positive and finite");
    validate(cfg.sig_f, "sig_f");
    validate(cfg.sig_s, "sig_s");

    std::vector<std::string> warnings;
    auto ratio_warning = [&](double ratio, const char* what) {
        if (ratio < kTimescaleWarnRatio) {
            std::ostringstream os;
            os << what << " = " << ratio << " is below " << kTimescaleWarnRatio
               << "; timescale separation is weak";
            warnings.push_back(os.str());
        }
    };
    ratio_warning(cfg.tau_s / cfg.tau_f, "tau_s/tau_f");
    ratio_warning(cfg.tau_u / cfg.tau_s, "tau_u/tau_s");
    return warnings;
}

} // namespace mfn
