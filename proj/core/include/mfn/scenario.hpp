#pragma once

// Scenario files and the runner that turns them into artifacts.

#include "mfn/analysis.hpp"
#include "mfn/io.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mfn {

enum class ScenarioKind { simulate, staircase, neuromod_sweep, temperature_sweep, inactivation_compare, curves, classify };

const char* to_string(ScenarioKind k) noexcept;
ScenarioKind parse_scenario_kind(const std::string& s);

struct StaircaseSpec {
    std::vector<double> amplitudes;
    double level_duration = 0.0; // <= 0: 9 tau_u
    double settle = 0.0;         // per-level transient skipped by the metrics; <= 0: 3 tau_u

    bool operator==(const StaircaseSpec&) const = default;
};

struct TemperatureSpec {
    double t_base = 298.15; // temperature at which cfg holds (K)
    std::vector<double> temperatures;
    double alpha = 0.0; // <= 0: calibrated

    bool operator==(const TemperatureSpec&) const = default;
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::simulate;
    BiasConfiguration cfg;
    // Absent input means a constant at the classifier's confirmation input.
    std::optional<InputSignal> input;
    // Absent solver means defaults with t_end = 9 tau_u.
    std::optional<SolverOptions> solver;
    std::optional<StaircaseSpec> staircase;
    std::optional<SweepOptions> sweep;
    std::optional<TemperatureSpec> temperature;
    std::optional<CurveGrid> grid;
    std::string output_dir; // relative to the working directory; CLI --out overrides
};

inline constexpr double kDefaultRunTauU = 9.0;

Json to_json(const Scenario& s);
// Also accepts "preset": "<name>" in place of "cfg".
Scenario scenario_from_json(const Json& j);
Scenario load_config(const std::filesystem::path& path);
void save_config(const Scenario& s, const std::filesystem::path& path);
std::string dump_config(const Scenario& s);

// Throws InputError when kind-specific sections are missing, ParameterError for
// invalid values. Runs before any computation.
void check_scenario(const Scenario& s);

SolverOptions effective_solver(const Scenario& s);
InputSignal effective_input(const Scenario& s);

struct ScenarioResult {
    Json summary;
    std::vector<std::filesystem::path> files;
};

// Writes artifacts and summary.json into `out_dir` (created if needed).
ScenarioResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

// Per-spike width and per-burst duration, measured after the ultraslow transient.
struct EventShape {
    FiringMetrics metrics;
    double mean_spike_width = 0.0;
    std::optional<double> mean_burst_duration;
};

EventShape measure_events(const Trace& trace, const BiasConfiguration& cfg, const SolverOptions& opts);

} // namespace mfn
