#include <doctest.h>

#include "fixtures.hpp"
#include "mfn/analysis.hpp"
#include "mfn/error.hpp"

#include <cmath>

using namespace mfn;
using fx::nA;

namespace {

double s(double x, const SigmoidParams& p) { return sigmoid_eval(x, p, p.i_gain0); }

// Slope sign changes of `f` on a dense uniform grid.
std::vector<double> brute_folds(const std::function<double(double)>& f, double lo, double hi, int n) {
    std::vector<double> out;
    const double h = (hi - lo) / n;
    double prev = f(lo + h) - f(lo);
    for (int k = 1; k < n; ++k) {
        const double d = f(lo + (k + 1) * h) - f(lo + k * h);
        if ((d > 0) != (prev > 0)) out.push_back(lo + k * h);
        prev = d;
    }
    return out;
}

} // namespace

TEST_CASE("unit-gain curves reduce to sums of sigmoids") {
    const BiasConfiguration c = fx::unit_cfg();
    for (double x : {0.0, 0.1, 0.3, 0.7, 1.5, 4.0}) {
        const double i = x * nA;
        CHECK(fast_curve(i, c) == doctest::Approx(i - s(i, c.sig_f)).scale(nA).epsilon(1e-14));
        CHECK(slow_curve(i, c) == doctest::Approx(2 * i - s(i, c.sig_f) - s(i, c.sig_s)).scale(nA).epsilon(1e-14));
        CHECK(ultraslow_curve(i, c) ==
              doctest::Approx(3 * i - s(i, c.sig_f) - s(i, c.sig_s)).scale(nA).epsilon(1e-14));
    }
}

TEST_CASE("curve slopes match finite differences") {
    BiasConfiguration c = fx::unit_cfg();
    c.g_f = 2.5;
    c.g_s = 0.7;
    c.g_u = 1.3;
    const double h = 1e-7 * nA;
    for (double x : {0.05, 0.25, 0.45, 0.8, 1.2}) {
        const double i = x * nA;
        auto fd = [&](double (*f)(double, const BiasConfiguration&)) { return (f(i + h, c) - f(i - h, c)) / (2 * h); };
        CHECK(fast_curve_slope(i, c) == doctest::Approx(fd(fast_curve)).epsilon(1e-6));
        CHECK(slow_curve_slope(i, c) == doctest::Approx(fd(slow_curve)).epsilon(1e-6));
        CHECK(ultraslow_curve_slope(i, c) == doctest::Approx(fd(ultraslow_curve)).epsilon(1e-6));
    }
}

TEST_CASE("grid validation") {
    const BiasConfiguration c = fx::unit_cfg();
    CHECK_THROWS_AS(steady_state_curves(c, {0, nA, 10}), ParameterError);
    CHECK_THROWS_AS(steady_state_curves(c, {nA, 0, 1024}), ParameterError);
    const CurveGrid g = default_grid(c);
    CHECK(g.i_max > c.sig_f.i_thr + c.sig_f.i_lin);
    CHECK(g.points == 4096);
    const CurveSet cs = steady_state_curves(c, g);
    CHECK(cs.fast.grid.size() == 4096);
    CHECK(cs.fast.grid.front() == g.i_min);
    CHECK(cs.fast.grid.back() == doctest::Approx(g.i_max));
}

TEST_CASE("folds agree with a dense scan") {
    const BiasConfiguration c = fx::unit_cfg();
    const CurveGrid g = default_grid(c);
    const CurveSet cs = steady_state_curves(c, g);
    REQUIRE(cs.fast.folds.size() == 2);
    auto f = [&](double x) { return fast_curve(x, c); };
    const auto ref = brute_folds(f, g.i_min, g.i_max, 100000);
    REQUIRE(ref.size() == 2);
    const double step = (g.i_max - g.i_min) / 100000;
    for (int k = 0; k < 2; ++k) {
        CHECK(std::abs(cs.fast.folds[k].i_bar - ref[k]) < 2 * step);
        CHECK(std::abs(fast_curve_slope(cs.fast.folds[k].i_bar, c)) < 1e-4);
    }
    REQUIRE(cs.fast.bistability_window);
    CHECK(cs.fast.bistability_window->low == doctest::Approx(f(cs.fast.folds[1].i_bar)));
    CHECK(cs.fast.bistability_window->high == doctest::Approx(f(cs.fast.folds[0].i_bar)));
    CHECK_FALSE(cs.fast.multi_fold);
}

TEST_CASE("multi-fold curves report the outermost pair") {
    const CurveGrid g{0.0, 10.0, 2048};
    auto v = [](double x) { return x - 1.5 * std::sin(2 * x); };
    auto d = [](double x) { return 1 - 3 * std::cos(2 * x); };
    const SteadyStateCurve c = make_curve(CurveKind::fast, g, v, d);
    CHECK(c.multi_fold);
    REQUIRE(c.folds.size() >= 4);
    for (const auto& f : c.folds) CHECK(std::abs(d(f.i_bar)) < 1e-6);
    REQUIRE(c.bistability_window);
    const double a = c.folds.front().i_app, b = c.folds.back().i_app;
    CHECK(c.bistability_window->low == std::min(a, b));
    CHECK(c.bistability_window->high == std::max(a, b));
}

TEST_CASE("linear configuration rests") {
    const BiasConfiguration c = fx::linear_cfg();
    const RegimeReport r = classify(c);
    CHECK(r.label == RegimeLabel::resting);
    CHECK_FALSE(r.fast_window);
    CHECK(r.ultraslow_monotone);
    CHECK_FALSE(confirmation_input(r, c));
}

TEST_CASE("slow threshold placement decides the label") {
    BiasConfiguration c;
    c.g_s = 0.5;
    c.g_u = 3.0; // keeps the ultraslow curve monotone
    c.sig_f = {0.5 * nA, 0.5 * nA, 1.0 * nA};
    // Slow positive feedback active below the fast fold.
    c.sig_s = {0.0, 0.3 * nA, 0.6 * nA};
    const RegimeReport burst = classify(c);
    CHECK(burst.label == RegimeLabel::bursting_capable);
    REQUIRE(burst.slow_window);
    REQUIRE(burst.fast_window);
    CHECK(burst.slow_window->low < burst.fast_window->low);
    const auto in = confirmation_input(burst, c);
    REQUIRE(in);
    CHECK(*in > 0.0);

    c.sig_s.i_gain0 = 0.0;
    const RegimeReport spike = classify(c);
    CHECK(spike.label == RegimeLabel::spiking_only);
    // The slow curve still inherits a fold from S_f, nested inside the fast one.
    if (spike.slow_window) CHECK(spike.slow_window->low >= spike.fast_window->low);
    const auto in2 = confirmation_input(spike, c);
    REQUIRE(in2);
    CHECK(spike.fast_window->contains(ultraslow_curve(spike.fast_folds->low, c)));
    CHECK(*in2 == doctest::Approx(ultraslow_curve(spike.fast_folds->low + 0.1 * spike.fast_folds->width(), c)));
}

TEST_CASE("equilibria of the linear chain") {
    BiasConfiguration c = fx::linear_cfg();
    c.g_f = 2.0;
    const auto eq = equilibria(c, 1 * nA);
    REQUIRE(eq.size() == 1);
    const double i_f = 2 * nA / (1 + 2 * (c.g_s + c.g_u));
    CHECK(eq[0].state.i_f == doctest::Approx(i_f).epsilon(1e-12));
    CHECK(eq[0].stable);
}

TEST_CASE("equilibria zero the vector field") {
    const BiasConfiguration c = fx::unit_cfg();
    for (double ia : {0.05, 0.3, 0.6, 1.0, 2.0}) {
        for (const auto& e : equilibria(c, ia * nA)) {
            const StateRate r = vector_field(e.state, ia * nA, c);
            CHECK(std::abs(r.i_f * c.tau_f) < 1e-9 * nA);
            CHECK(std::abs(r.i_s * c.tau_s) < 1e-9 * nA);
            CHECK(std::abs(r.i_u * c.tau_u) < 1e-9 * nA);
        }
    }
    // Freezing i_u exposes the fast fold.
    const CurveSet cs = steady_state_curves(c);
    REQUIRE(cs.slow.bistability_window);
    const double mid = 0.5 * (cs.slow.bistability_window->low + cs.slow.bistability_window->high);
    const auto eq = equilibria(c, mid, EquilibriumLevel::slow, 0.0);
    CHECK(eq.size() == 3);
    CHECK(eq[0].stable);
    CHECK_FALSE(eq[1].stable);
    CHECK(eq[2].stable);
}

TEST_CASE("sweep parameters") {
    BiasConfiguration c = fx::unit_cfg();
    for (const char* n : {"sig_s.i_gain0", "sig_f.i_gain0", "sig_s.i_thr", "sig_f.i_thr", "g_s", "g_u"}) {
        const SweepParam p = parse_sweep_param(n);
        CHECK(std::string(to_string(p)) == n);
        set_param(c, p, 0.123);
        CHECK(get_param(c, p) == 0.123);
    }
    CHECK_THROWS_AS(parse_sweep_param("tau_f"), ParameterError);
}

TEST_CASE("sweep spacing and validation") {
    const BiasConfiguration c = fx::unit_cfg();
    SweepOptions o;
    o.lo = 0.25 * nA;
    o.hi = 4 * nA;
    o.steps = 9;
    o.simulate = false;
    const SweepReport r = neuromod_sweep(c, o);
    REQUIRE(r.steps.size() == 9);
    for (std::size_t k = 1; k < r.steps.size(); ++k)
        CHECK(r.steps[k].value / r.steps[k - 1].value == doctest::Approx(std::pow(16.0, 1.0 / 8)));
    CHECK(r.steps.back().value == o.hi);
    for (const auto& st : r.steps) CHECK_FALSE(st.metrics);

    o.lo = 0.0;
    CHECK(neuromod_sweep(c, o).steps[1].value == doctest::Approx(0.5 * nA));
    o.steps = 4;
    CHECK_THROWS_AS(neuromod_sweep(c, o), ParameterError);
    o.steps = 8;
    o.lo = 2 * nA;
    o.hi = 1 * nA;
    CHECK_THROWS_AS(neuromod_sweep(c, o), ParameterError);
}
