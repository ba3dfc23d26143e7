#include "mfn/device_map.hpp"

#include "mfn/error.hpp"

#include <cmath>
#include <sstream>

namespace mfn {

namespace {

void check_temperature(double t) {
    if (!(t >= kMinTemperature && t <= kMaxTemperature)) {
        std::ostringstream os;
        os << "temperature " << t << " K outside [" << kMinTemperature << ", " << kMaxTemperature << "] K";
        throw DomainError(os.str());
    }
}

double alpha_of(const TempModel& m) { return m.alpha != 0.0 ? m.alpha : calibrated_alpha(); }

} // namespace

double calibrated_alpha() noexcept { return std::log(50.0) / 40.0; }

double thermal_voltage(double temperature) {
    check_temperature(temperature);
    return kBoltzmann * temperature / kElementaryCharge;
}

void validate(const DeviceParams& dev) {
    if (!(dev.kappa > 0.0 && dev.kappa <= 1.0)) throw ParameterError("kappa must lie in (0, 1]");
    if (!(dev.i0 > 0.0) || !std::isfinite(dev.i0)) throw ParameterError("i0 must be positive");
    check_temperature(dev.t_ref);
}

double leakage_current(const DeviceParams& dev, double temperature, const TempModel& model) {
    validate(dev);
    check_temperature(temperature);
    return dev.i0 * std::exp(alpha_of(model) * (temperature - dev.t_ref));
}

double bias_voltage_to_current(double v, const DeviceParams& dev, double temperature, const TempModel& model) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("bias voltage must be non-negative");
    return leakage_current(dev, temperature, model) * std::exp(dev.kappa * v / thermal_voltage(temperature));
}

double current_to_bias_voltage(double i, const DeviceParams& dev, double temperature, const TempModel& model) {
    if (!(i > 0.0) || !std::isfinite(i)) throw DomainError("current must be positive");
    return thermal_voltage(temperature) / dev.kappa * std::log(i / leakage_current(dev, temperature, model));
}

DpiParams dpi_params(const DpiSpec& spec, const DeviceParams& dev, double temperature) {
    validate(dev);
    if (!(spec.c > 0.0 && spec.i_tau > 0.0 && spec.i_th > 0.0)) throw ParameterError("DPI values must be positive");
    return {spec.i_th / spec.i_tau, spec.c * thermal_voltage(temperature) / (dev.kappa * spec.i_tau)};
}

BiasConfiguration uniform_scale(const BiasConfiguration& cfg, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("scale factor must be positive");
    BiasConfiguration out = cfg;
    out.tau_f /= lambda;
    out.tau_s /= lambda;
    out.tau_u /= lambda;
    for (SigmoidParams* s : {&out.sig_f, &out.sig_s}) {
        s->i_thr *= lambda;
        s->i_lin *= lambda;
        s->i_gain0 *= lambda;
    }
    return out;
}

InputSignal scale_input(const InputSignal& input, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("scale factor must be positive");
    std::vector<InputSignal::Segment> segs = input.segments();
    for (auto& s : segs) {
        s.start /= lambda;
        s.amplitude *= lambda;
    }
    return InputSignal(std::move(segs));
}

SolverOptions scale_solver(const SolverOptions& opts, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("scale factor must be positive");
    SolverOptions out = opts;
    out.dt /= lambda;
    out.t_end /= lambda;
    out.initial_state = {opts.initial_state.i_f * lambda, opts.initial_state.i_s * lambda,
                         opts.initial_state.i_u * lambda};
    if (out.thresholds) {
        out.thresholds->rise *= lambda;
        out.thresholds->fall *= lambda;
    }
    if (out.bursts.max_intra_isi) *out.bursts.max_intra_isi /= lambda;
    return out;
}

double temperature_speedup(double t_from, double t_to, const TempModel& model) {
    check_temperature(t_from);
    check_temperature(t_to);
    return std::exp(alpha_of(model) * (t_to - t_from));
}

BiasConfiguration temperature_transform(const BiasConfiguration& cfg, double t_from, double t_to,
                                        const TempModel& model) {
    if (t_from == t_to) {
        check_temperature(t_from);
        return cfg;
    }
    return uniform_scale(cfg, temperature_speedup(t_from, t_to, model));
}

} // namespace mfn
