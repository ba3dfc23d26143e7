#pragma once

// Behavioral model of the current-mode mixed-feedback neuron.
//
// Three first-order low-pass filters (fast, slow, ultraslow) in a feedback loop:
//
//   tau_f dI_f/dt = -I_f + G_f * u
//   tau_s dI_s/dt = -I_s + G_s * I_f
//   tau_u dI_u/dt = -I_u + G_u * I_f
//
//   u = S_f(I_f; I_Gf) + S_s(I_s; I_Gs) - I_s - I_u + I_app
//
// S_f and S_s are saturating sigmoids (fast and slow positive feedback); -I_s
// and -I_u are the linear slow and ultraslow negative feedback. With
// inactivation enabled the sigmoid gains are reduced by the slower currents,
// I_Gf = I_Gf0 - I_s and I_Gs = I_Gs0 - I_u (floored at zero).
//
// All currents are in amperes, all times in seconds.

#include <string>
#include <vector>

namespace mfn {

struct SigmoidParams {
    double i_thr = 0.0;   // input threshold
    double i_lin = 1e-9;  // width of the rising range
    double i_gain0 = 0.0; // baseline saturation output

    bool operator==(const SigmoidParams&) const = default;
};

struct BiasConfiguration {
    double tau_f = 1e-3;
    double tau_s = 1e-2;
    double tau_u = 2e-1;
    double g_f = 1.0;
    double g_s = 1.0;
    double g_u = 1.0;
    SigmoidParams sig_f;
    SigmoidParams sig_s;
    bool inactivation_enabled = false;
    bool rectify_filter_inputs = true;

    bool operator==(const BiasConfiguration&) const = default;
};

struct NeuronState {
    double i_f = 0.0;
    double i_s = 0.0;
    double i_u = 0.0;

    bool operator==(const NeuronState&) const = default;
};

// Time derivative of a NeuronState (A/s per component).
using StateRate = NeuronState;

// Piecewise-constant applied current. The current before the first segment is zero.
class InputSignal {
public:
    struct Segment {
        double start = 0.0;
        double amplitude = 0.0;
        bool operator==(const Segment&) const = default;
    };

    InputSignal() = default;
    explicit InputSignal(std::vector<Segment> segments);

    static InputSignal constant(double amplitude);
    // One segment per amplitude, each lasting `level_duration`, starting at t = 0.
    static InputSignal staircase(const std::vector<double>& amplitudes, double level_duration);

    double at(double t) const;
    const std::vector<Segment>& segments() const noexcept { return segments_; }
    double max_amplitude() const noexcept;

    bool operator==(const InputSignal&) const = default;

private:
    std::vector<Segment> segments_;
};

// Logistic map normalized to sigma(1/2) = 1/2, sigma(0) ~ 0.018, sigma(1) ~ 0.982.
double sigma(double x) noexcept;
double sigma_slope(double x) noexcept;
inline constexpr double kSigmoidSteepness = 8.0;

// S(i_in) = gain * sigma((i_in - i_thr) / i_lin). Throws ParameterError for invalid params.
double sigmoid_eval(double i_in, const SigmoidParams& p, double i_gain_effective);
// dS/di_in.
double sigmoid_slope(double i_in, const SigmoidParams& p, double i_gain_effective);

struct EffectiveGains {
    double i_gf = 0.0;
    double i_gs = 0.0;
};

EffectiveGains effective_gains(const NeuronState& state, const BiasConfiguration& cfg) noexcept;

StateRate vector_field(const NeuronState& state, double i_app, const BiasConfiguration& cfg);

// Net current into the fast filter before rectification.
double fast_filter_input(const NeuronState& state, double i_app, const BiasConfiguration& cfg);

void validate(const SigmoidParams& p, const std::string& name = "sigmoid");

// Throws ParameterError on hard violations; returns warnings (weak timescale separation).
std::vector<std::string> validate(const BiasConfiguration& cfg);

inline constexpr double kTimescaleWarnRatio = 10.0;

} // namespace mfn
