#pragma once

// Steady-state geometry of the neuron and the regime classifier built on it.
//
// Each curve is parametrized by the fast equilibrium current Ibar = i_f.
// Setting the derivatives to zero fastest-first, with slower variables at
// equilibrium (i_s = G_s Ibar, i_u = G_u Ibar), gives the applied current
// that holds the neuron there:
//
//   fast:      Ibar / G_f - S_f(Ibar)
//   slow:      fast + G_s Ibar - S_s(G_s Ibar)
//   ultraslow: slow + G_u Ibar
//
// With unit gains these reduce to Ibar - S_f, 2 Ibar - S_f - S_s and
// 3 Ibar - S_f - S_s. Inactivation is ignored here.

#include "mfn/dynamics.hpp"
#include "mfn/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mfn {

struct CurveGrid {
    double i_min = 0.0;
    double i_max = 0.0;
    int points = 4096;

    bool operator==(const CurveGrid&) const = default;
};

inline constexpr int kMinCurvePoints = 256;

// Covers both sigmoid rising ranges with a 2x margin.
CurveGrid default_grid(const BiasConfiguration& cfg, int points = 4096);

struct Fold {
    double i_bar = 0.0;
    double i_app = 0.0;
};

struct Window {
    double low = 0.0;
    double high = 0.0;
    double width() const noexcept { return high - low; }
    bool contains(double x) const noexcept { return x >= low && x <= high; }
};

enum class CurveKind { fast, slow, ultraslow };
const char* to_string(CurveKind k) noexcept;

struct SteadyStateCurve {
    CurveKind kind = CurveKind::fast;
    std::vector<double> grid;  // Ibar, ascending
    std::vector<double> i_app; // curve value at each grid point
    std::vector<Fold> folds;
    std::optional<Window> bistability_window; // outermost fold pair, in this curve's own i_app
    bool multi_fold = false;                  // more than two slope sign changes

    // Analytic curve and slope, used for fold refinement.
    std::function<double(double)> value;
    std::function<double(double)> slope;
};

struct CurveSet {
    SteadyStateCurve fast;
    SteadyStateCurve slow;
    SteadyStateCurve ultraslow;
};

// Analytic curve values; shared by the sampled curves and the oracles.
double fast_curve(double i_bar, const BiasConfiguration& cfg);
double slow_curve(double i_bar, const BiasConfiguration& cfg);
double ultraslow_curve(double i_bar, const BiasConfiguration& cfg);
double fast_curve_slope(double i_bar, const BiasConfiguration& cfg);
double slow_curve_slope(double i_bar, const BiasConfiguration& cfg);
double ultraslow_curve_slope(double i_bar, const BiasConfiguration& cfg);

CurveSet steady_state_curves(const BiasConfiguration& cfg, const CurveGrid& grid);
CurveSet steady_state_curves(const BiasConfiguration& cfg);

// Sampled curve from arbitrary analytic expressions, folds filled in.
SteadyStateCurve make_curve(CurveKind kind, const CurveGrid& grid, std::function<double(double)> value,
                            std::function<double(double)> slope);

// Central-difference slope sign changes, refined by bisection on the analytic
// slope down to rounding level. Fills folds, window and the multi-fold flag.
void find_folds(SteadyStateCurve& curve);

enum class RegimeLabel { resting, spiking_only, bursting_capable };
const char* to_string(RegimeLabel l) noexcept;

struct RegimeReport {
    RegimeLabel label = RegimeLabel::resting;
    // Windows referred to the neuron input: fold positions mapped through the
    // ultraslow curve, which gives the applied current at full equilibrium.
    std::optional<Window> fast_window;
    std::optional<Window> slow_window;
    bool ultraslow_monotone = false;
    bool rest_return_guaranteed = false;
    // Outermost fold positions in Ibar.
    std::optional<Window> fast_folds;
    std::optional<Window> slow_folds;
};

RegimeReport classify_regime(const SteadyStateCurve& fast, const SteadyStateCurve& slow,
                             const SteadyStateCurve& ultraslow);
RegimeReport classify_regime(const CurveSet& curves);
RegimeReport classify(const BiasConfiguration& cfg);

// Constant input used to confirm a label by simulation. Bursting: the part of
// the slow fold interval below the fast fold, at its midpoint. Spiking: 10% into
// the fast fold interval. Empty for resting.
std::optional<double> confirmation_input(const RegimeReport& report, const BiasConfiguration& cfg);

enum class EquilibriumLevel { full, slow };

struct Equilibrium {
    NeuronState state;
    bool stable = false;
};

// Roots of the unrectified, inactivation-free vector field. The slow level
// freezes i_u at `i_u_frozen` and solves the fast/slow pair.
std::vector<Equilibrium> equilibria(const BiasConfiguration& cfg, double i_app,
                                    EquilibriumLevel level = EquilibriumLevel::full, double i_u_frozen = 0.0);

// Bias parameters a sweep can vary.
enum class SweepParam { sig_s_gain, sig_f_gain, sig_s_thr, sig_f_thr, g_s, g_u };
const char* to_string(SweepParam p) noexcept;
SweepParam parse_sweep_param(const std::string& name);
double get_param(const BiasConfiguration& cfg, SweepParam p);
void set_param(BiasConfiguration& cfg, SweepParam p, double v);

struct SweepOptions {
    SweepParam param = SweepParam::sig_s_gain;
    double lo = 0.0;
    double hi = 0.0;
    int steps = 16;
    bool simulate = true;
    // Confirmation run length and metrics window, in units of tau_u.
    double sim_duration_tau_u = 9.0;
};

inline constexpr int kMinSweepSteps = 8;

struct SweepStep {
    double value = 0.0;
    RegimeLabel label = RegimeLabel::resting;
    std::optional<double> input;
    std::optional<FiringMetrics> metrics;
};

struct SweepReport {
    std::vector<SweepStep> steps;
    std::optional<int> classifier_transition; // first bursting-capable index after a non-bursting one
    std::optional<int> simulation_transition; // same, for the simulated regime
    std::optional<double> transition_value;
    int classifier_changes = 0; // number of label flips into or out of bursting
};

// Geometric spacing when lo > 0, linear otherwise. Steps run independently.
SweepReport neuromod_sweep(const BiasConfiguration& cfg, const SweepOptions& opts);

} // namespace mfn
