#pragma once

// JSON conversion for the domain types and the CSV artifact formats.
//
// Readers are strict: unknown keys and wrong types raise ParseError with the
// offending field path. Writers emit every field, so load(save(x)) == x.

#include "mfn/analysis.hpp"
#include "mfn/dynamics.hpp"
#include "mfn/model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace mfn {

using Json = nlohmann::ordered_json;

Json to_json(const SigmoidParams& p);
Json to_json(const BiasConfiguration& cfg);
Json to_json(const NeuronState& s);
Json to_json(const InputSignal& in);
Json to_json(const SolverOptions& o);
Json to_json(const CurveGrid& g);
Json to_json(const SweepOptions& o);
Json to_json(const FiringMetrics& m);
Json to_json(const Burst& b);
Json to_json(const Window& w);
Json to_json(const RegimeReport& r);
Json to_json(const SteadyStateCurve& c); // folds and window only
Json to_json(const SweepReport& r);

// `where` prefixes error paths, e.g. "cfg".
SigmoidParams sigmoid_from_json(const Json& j, const std::string& where = "sigmoid");
BiasConfiguration config_from_json(const Json& j, const std::string& where = "cfg");
NeuronState state_from_json(const Json& j, const std::string& where = "state");
InputSignal input_from_json(const Json& j, const std::string& where = "input");
SolverOptions solver_from_json(const Json& j, const std::string& where = "solver");
CurveGrid grid_from_json(const Json& j, const std::string& where = "grid");
SweepOptions sweep_from_json(const Json& j, const std::string& where = "sweep");

// Parses text, reporting syntax errors as "line L, column C".
Json parse_json_text(const std::string& text, const std::string& source = "");
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Shortest round-trip decimal representation.
std::string format_double(double v);

inline constexpr const char* kTraceHeader = "t_s,i_f_A,i_s_A,i_u_A,i_app_A,spike";

// Spike column marks the first recorded sample at or after each detected spike.
void write_trace_csv(std::ostream& os, const Trace& trace);
void export_trace(const Trace& trace, const std::filesystem::path& path);
// Spikes come from the marker column; bursts are re-segmented with `opts`.
Trace read_trace_csv(std::istream& is, const BurstOptions& opts = {});
Trace import_trace(const std::filesystem::path& path, const BurstOptions& opts = {});

// Comment lines "# fold,<curve>,<i_bar_A>,<i_app_A>" and
// "# window,<curve>,<low_A>,<high_A>" precede the sampled columns.
void write_curves_csv(std::ostream& os, const CurveSet& curves);
void export_curves(const CurveSet& curves, const std::filesystem::path& path);

} // namespace mfn
