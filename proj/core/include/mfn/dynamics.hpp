#pragma once

#include "mfn/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mfn {

// Hysteretic spike detector levels on i_f. A spike is an upward crossing of
// `rise`; the detector re-arms once i_f drops below `fall`.
struct SpikeThresholds {
    double rise = 0.0;
    double fall = 0.0;
};

inline constexpr double kDefaultRiseFraction = 0.3;
inline constexpr double kDefaultFallFraction = 0.15;

// 0.3 / 0.15 of the baseline fast sigmoid gain. Empty when that gain is zero:
// without fast positive feedback there is nothing to detect.
std::optional<SpikeThresholds> default_thresholds(const BiasConfiguration& cfg);

struct BurstOptions {
    // Minimum ratio between the mean long and mean short inter-spike interval.
    double split_factor = 2.5;
    // Fixed maximum intra-burst ISI (s); replaces the adaptive split when set.
    std::optional<double> max_intra_isi;
};

struct SolverOptions {
    double dt = 0.0; // <= 0 selects tau_f / 50
    double t_end = 1.0;
    int record_stride = 1;
    NeuronState initial_state{};
    std::optional<SpikeThresholds> thresholds; // defaults from the configuration
    BurstOptions bursts{};
};

inline constexpr double kMaxStepFraction = 20.0;     // dt <= tau_f / 20
inline constexpr double kDefaultStepFraction = 50.0; // dt = tau_f / 50

struct Burst {
    double start = 0.0; // first spike time
    double end = 0.0;   // last spike time
    int spike_count = 0;

    bool operator==(const Burst&) const = default;
};

struct Trace {
    std::vector<double> t;
    std::vector<double> i_f;
    std::vector<double> i_s;
    std::vector<double> i_u;
    std::vector<double> i_app;
    std::vector<double> spikes;
    std::vector<Burst> bursts;

    double dt = 0.0; // integration step actually used
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return t.size(); }
    bool empty() const noexcept { return t.empty(); }
    double duration() const noexcept { return t.empty() ? 0.0 : t.back() - t.front(); }
};

enum class FiringRegime { quiescent, tonic_spiking, bursting };

const char* to_string(FiringRegime r) noexcept;

struct FiringMetrics {
    double spike_rate = 0.0;
    std::optional<double> burst_rate; // needs at least two bursts
    double mean_spikes_per_burst = 0.0;
    std::vector<int> spikes_per_burst;
    double duty_cycle = 0.0; // fraction of the window spent inside bursts
    FiringRegime regime = FiringRegime::quiescent;
    double window_start = 0.0;
    double window_end = 0.0;
    std::size_t spike_count = 0;
};

struct MetricsOptions {
    double window_start = 0.0;
    std::optional<double> window_end; // trace end when empty
    BurstOptions bursts{};
};

// Fixed-step classic RK4. Throws IntegrationDiverged on a non-finite state.
Trace integrate(const BiasConfiguration& cfg, const InputSignal& input, const SolverOptions& opts);

// Resolved step size for `opts` (auto-selection and shrink rule applied).
double resolve_step(const BiasConfiguration& cfg, const SolverOptions& opts,
                    std::vector<std::string>* warnings = nullptr);

std::vector<double> detect_spikes(const Trace& trace, const SpikeThresholds& thresholds);

std::vector<Burst> segment_bursts(const std::vector<double>& spike_times, const BurstOptions& opts = {});

FiringMetrics firing_metrics(const Trace& trace, const MetricsOptions& opts);
// Window starts at 3 tau_u to skip the ultraslow transient.
FiringMetrics firing_metrics(const Trace& trace, const BiasConfiguration& cfg);

inline constexpr double kTransientUltraslowMultiple = 3.0;

// Contiguous interval during which i_f stays above the `fall` level and which
// contains a `rise` crossing.
struct EventExtent {
    double start = 0.0;
    double end = 0.0;
    double width() const noexcept { return end - start; }
};

std::vector<EventExtent> spike_extents(const Trace& trace, const SpikeThresholds& thresholds,
                                       double window_start = 0.0);

// Burst durations measured on the above-`fall` envelope: from the start of the
// first spike extent to the end of the last spike extent of each burst.
std::vector<double> burst_durations(const Trace& trace, const SpikeThresholds& thresholds,
                                    double window_start = 0.0, const BurstOptions& opts = {});

} // namespace mfn
