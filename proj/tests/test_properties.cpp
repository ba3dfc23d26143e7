#include <doctest.h>

#include "fixtures.hpp"
#include "mfn/analysis.hpp"
#include "mfn/device_map.hpp"
#include "mfn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace mfn;
using fx::nA;

namespace {

BiasConfiguration random_cfg(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    BiasConfiguration c;
    c.tau_f = 1e-3;
    c.tau_s = c.tau_f * (10 + 30 * U(rng));
    c.tau_u = c.tau_s * (10 + 30 * U(rng));
    c.g_f = 0.5 + 3 * U(rng);
    c.g_s = 0.5 + 4 * U(rng);
    c.g_u = 0.5 + 4 * U(rng);
    c.sig_f = {0.3 * U(rng) * nA, (0.05 + 0.5 * U(rng)) * nA, (0.2 + 1.5 * U(rng)) * nA};
    c.sig_s = {0.3 * U(rng) * nA, (0.05 + 0.8 * U(rng)) * nA, 1.0 * U(rng) * nA};
    c.inactivation_enabled = U(rng) < 0.5;
    return c;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b, double lam) {
    double scale = 0.0, err = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        scale = std::max(scale, std::abs(a[k]));
        err = std::max(err, std::abs(b[k] / lam - a[k]));
    }
    return scale > 0 ? err / scale : err;
}

} // namespace

TEST_CASE("uniform scaling maps trajectories onto each other") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 6; ++trial) {
        const BiasConfiguration c = random_cfg(rng);
        const double lam = std::pow(10.0, std::uniform_real_distribution<double>(-1, 1)(rng));
        SolverOptions o;
        o.t_end = 2 * c.tau_s;
        o.dt = c.tau_f / 40;
        const InputSignal in({{0.0, 0.2 * nA}, {c.tau_s / 2, 0.8 * nA}});
        const Trace a = integrate(c, in, o);
        const Trace b = integrate(uniform_scale(c, lam), scale_input(in, lam), scale_solver(o, lam));
        REQUIRE(a.size() == b.size());
        CHECK(max_rel_diff(a.i_f, b.i_f, lam) < 1e-9);
        CHECK(max_rel_diff(a.i_u, b.i_u, lam) < 1e-9);
        CHECK(a.spikes.size() == b.spikes.size());
    }
}

TEST_CASE("classifier is scale invariant") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const BiasConfiguration c = random_cfg(rng);
        const double lam = 0.1 + 9.9 * std::uniform_real_distribution<double>(0, 1)(rng);
        const RegimeReport a = classify(c);
        const RegimeReport b = classify(uniform_scale(c, lam));
        CHECK(a.label == b.label);
        REQUIRE(a.fast_window.has_value() == b.fast_window.has_value());
        if (a.fast_window) {
            const double tol = 1e-3 * a.fast_window->width() * lam + 1e-6 * lam * nA;
            CHECK(std::abs(b.fast_window->low - lam * a.fast_window->low) < tol);
            CHECK(std::abs(b.fast_window->high - lam * a.fast_window->high) < tol);
        }
    }
}

TEST_CASE("refined folds are stationary points") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const BiasConfiguration c = random_cfg(rng);
        const CurveSet cs = steady_state_curves(c);
        for (const auto* curve : {&cs.fast, &cs.slow, &cs.ultraslow}) {
            CHECK(curve->folds.size() % 2 == 0);
            for (const auto& f : curve->folds) {
                CHECK(std::abs(curve->slope(f.i_bar)) < 1e-3);
                CHECK(f.i_app == doctest::Approx(curve->value(f.i_bar)));
            }
        }
    }
}

TEST_CASE("full equilibria are unique when the ultraslow curve is monotone") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        BiasConfiguration c = random_cfg(rng);
        c.inactivation_enabled = false;
        const RegimeReport r = classify(c);
        if (!r.ultraslow_monotone) continue;
        for (double ia : {0.1, 0.5, 1.5}) {
            const auto eq = equilibria(c, ia * nA);
            REQUIRE(eq.size() == 1);
            CHECK(ultraslow_curve(eq[0].state.i_f, c) == doctest::Approx(ia * nA).epsilon(1e-9));
        }
    }
}

TEST_CASE("smooth trajectories converge at fourth order") {
    // Sub-threshold input keeps the fast sigmoid flat: no events, smooth solution.
    const BiasConfiguration c = fx::unit_cfg();
    SolverOptions o;
    o.t_end = 0.05;
    o.initial_state = {0.05 * nA, 0.0, 0.0};
    const InputSignal in = InputSignal::constant(0.05 * nA);
    auto final_if = [&](double dt) {
        SolverOptions p = o;
        p.dt = dt;
        return integrate(c, in, p).i_f.back();
    };
    const double h = c.tau_f / 20;
    const double ref = final_if(h / 16);
    const double e1 = std::abs(final_if(h) - ref);
    const double e2 = std::abs(final_if(h / 2) - ref);
    CHECK(e1 > 0.0);
    CHECK(e1 / e2 > 8.0);
}

TEST_CASE("bursts are ordered and disjoint") {
    std::mt19937_64 rng(15);
    std::exponential_distribution<double> gap(1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> s;
        double t = 0.0;
        for (int k = 0; k < 60; ++k) {
            t += (k % 5 == 0 ? 20.0 : 0.1) * gap(rng);
            s.push_back(t);
        }
        const auto b = segment_bursts(s);
        int total = 0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            CHECK(b[k].spike_count >= 2);
            CHECK(b[k].end >= b[k].start);
            if (k > 0) CHECK(b[k].start > b[k - 1].end);
            total += b[k].spike_count;
        }
        CHECK(total <= static_cast<int>(s.size()));
    }
}

TEST_CASE("inactivation never raises the fast drive") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        BiasConfiguration c = random_cfg(rng);
        const NeuronState x{U(rng) * nA, U(rng) * nA, U(rng) * nA};
        const double ia = U(rng) * nA;
        c.inactivation_enabled = false;
        const double off = vector_field(x, ia, c).i_f;
        c.inactivation_enabled = true;
        CHECK(vector_field(x, ia, c).i_f <= off);
    }
}
