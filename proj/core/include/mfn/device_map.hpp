#pragma once

// Device-level quantities (bias voltages, capacitors, temperature) and the
// scaling transforms that relate operating points.

#include "mfn/dynamics.hpp"
#include "mfn/model.hpp"

namespace mfn {

inline constexpr double kBoltzmann = 1.380649e-23;         // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19; // C

inline constexpr double kMinTemperature = 250.0;
inline constexpr double kMaxTemperature = 400.0;

struct DeviceParams {
    double i0 = 1e-18;   // leakage prefactor at t_ref (A)
    double kappa = 0.7;  // subthreshold slope factor
    double t_ref = 300.0;

    bool operator==(const DeviceParams&) const = default;
};

struct DpiSpec {
    double c = 0.5e-12; // F
    double i_tau = 100e-12;
    double i_th = 100e-12;
};

struct DpiParams {
    double gain = 1.0;
    double tau = 0.0;
};

// Single exponential current speedup, s = exp(alpha * dT).
struct TempModel {
    double alpha = 0.0; // 1/K; defaults to the calibrated value when zero
};

// ln(50) / 40 K: a 50x current span between 5 and 45 degC.
double calibrated_alpha() noexcept;

double thermal_voltage(double temperature);
void validate(const DeviceParams& dev);

// Prefactor at `temperature`, following the same exponential as the temperature model.
double leakage_current(const DeviceParams& dev, double temperature, const TempModel& model = {});

double bias_voltage_to_current(double v, const DeviceParams& dev, double temperature, const TempModel& model = {});
double current_to_bias_voltage(double i, const DeviceParams& dev, double temperature, const TempModel& model = {});

DpiParams dpi_params(const DpiSpec& spec, const DeviceParams& dev, double temperature);

// Currents x lambda, time constants / lambda, gains unchanged.
BiasConfiguration uniform_scale(const BiasConfiguration& cfg, double lambda);
// Matching transforms for stimulus and solver settings.
InputSignal scale_input(const InputSignal& input, double lambda);
SolverOptions scale_solver(const SolverOptions& opts, double lambda);

double temperature_speedup(double t_from, double t_to, const TempModel& model = {});
BiasConfiguration temperature_transform(const BiasConfiguration& cfg, double t_from, double t_to,
                                        const TempModel& model = {});

} // namespace mfn
