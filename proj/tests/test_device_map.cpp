#include <doctest.h>

#include "fixtures.hpp"
#include "mfn/device_map.hpp"
#include "mfn/error.hpp"

#include <cmath>

using namespace mfn;
using fx::nA;

TEST_CASE("thermal voltage") {
    CHECK(thermal_voltage(300.0) == doctest::Approx(0.025852).epsilon(1e-4));
    CHECK(thermal_voltage(350.0) / thermal_voltage(300.0) == doctest::Approx(350.0 / 300.0));
    CHECK_THROWS_AS(thermal_voltage(100.0), DomainError);
    CHECK_THROWS_AS(thermal_voltage(NAN), DomainError);
}

TEST_CASE("calibrated speedup spans 50x over 40 K") {
    CHECK(temperature_speedup(278.15, 318.15) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(temperature_speedup(300, 300) == 1.0);
    CHECK(temperature_speedup(310, 290) * temperature_speedup(290, 310) == doctest::Approx(1.0));
    CHECK(temperature_speedup(290, 300, TempModel{0.1}) == doctest::Approx(std::exp(1.0)));
    CHECK_THROWS_AS(temperature_speedup(200, 300), DomainError);
}

TEST_CASE("leakage follows the temperature model") {
    const DeviceParams d;
    CHECK(leakage_current(d, d.t_ref) == d.i0);
    CHECK(leakage_current(d, d.t_ref + 40) == doctest::Approx(50 * d.i0));
    DeviceParams bad = d;
    bad.kappa = 1.5;
    CHECK_THROWS_AS(leakage_current(bad, 300), ParameterError);
    bad = d;
    bad.i0 = 0;
    CHECK_THROWS_AS(leakage_current(bad, 300), ParameterError);
}

TEST_CASE("bias voltage round trip") {
    const DeviceParams d;
    for (double T : {260.0, 300.0, 350.0})
        for (double v : {0.0, 0.1, 0.35, 0.6, 0.9}) {
            const double i = bias_voltage_to_current(v, d, T);
            CHECK(std::abs(current_to_bias_voltage(i, d, T) - v) < 1e-12);
        }
    // Subthreshold slope: one decade per U_T ln(10) / kappa.
    const double dv = thermal_voltage(300) * std::log(10.0) / d.kappa;
    CHECK(bias_voltage_to_current(0.3 + dv, d, 300) / bias_voltage_to_current(0.3, d, 300) ==
          doctest::Approx(10.0));
    CHECK_THROWS_AS(current_to_bias_voltage(0.0, d, 300), DomainError);
    CHECK_THROWS_AS(current_to_bias_voltage(-1e-9, d, 300), DomainError);
    CHECK_THROWS_AS(bias_voltage_to_current(-0.1, d, 300), DomainError);
}

TEST_CASE("DPI gain and time constant") {
    const DeviceParams d;
    DpiSpec s;
    s.c = 1e-12;
    s.i_tau = 10e-12;
    s.i_th = 30e-12;
    const DpiParams p = dpi_params(s, d, 300);
    CHECK(p.gain == doctest::Approx(3.0));
    CHECK(p.tau == doctest::Approx(1e-12 * thermal_voltage(300) / (0.7 * 10e-12)));
    DpiSpec big = s;
    big.c = 16e-12;
    CHECK(dpi_params(big, d, 300).tau / p.tau == doctest::Approx(16.0).epsilon(1e-15));
    s.i_tau = 0;
    CHECK_THROWS_AS(dpi_params(s, d, 300), ParameterError);
}

TEST_CASE("uniform scale") {
    const BiasConfiguration c = fx::unit_cfg();
    const BiasConfiguration s = uniform_scale(c, 4.0);
    CHECK(s.tau_f == c.tau_f / 4);
    CHECK(s.tau_u == c.tau_u / 4);
    CHECK(s.g_f == c.g_f);
    CHECK(s.sig_f.i_thr == 4 * c.sig_f.i_thr);
    CHECK(s.sig_s.i_gain0 == 4 * c.sig_s.i_gain0);
    CHECK(uniform_scale(c, 1.0) == c);
    CHECK_THROWS_AS(uniform_scale(c, 0.0), ParameterError);
    CHECK_THROWS_AS(uniform_scale(c, -2.0), ParameterError);

    const InputSignal in({{0.0, 1 * nA}, {0.5, 2 * nA}});
    const InputSignal si = scale_input(in, 4.0);
    CHECK(si.segments()[1].start == 0.125);
    CHECK(si.segments()[1].amplitude == 8 * nA);

    SolverOptions o;
    o.dt = 1e-5;
    o.t_end = 2;
    o.thresholds = SpikeThresholds{0.6 * nA, 0.3 * nA};
    o.bursts.max_intra_isi = 0.01;
    const SolverOptions so = scale_solver(o, 4.0);
    CHECK(so.dt == o.dt / 4);
    CHECK(so.t_end == 0.5);
    CHECK(so.thresholds->rise == doctest::Approx(2.4 * nA));
    CHECK(*so.bursts.max_intra_isi == 0.0025);
}

TEST_CASE("scaled vector field is the scaled rate") {
    BiasConfiguration c = fx::unit_cfg();
    c.inactivation_enabled = true;
    const double lam = 7.5;
    const BiasConfiguration s = uniform_scale(c, lam);
    const NeuronState x{0.3 * nA, 0.2 * nA, 0.1 * nA};
    const StateRate a = vector_field(x, 0.4 * nA, c);
    const StateRate b = vector_field({lam * x.i_f, lam * x.i_s, lam * x.i_u}, lam * 0.4 * nA, s);
    CHECK(b.i_f == doctest::Approx(lam * lam * a.i_f).epsilon(1e-13));
    CHECK(b.i_s == doctest::Approx(lam * lam * a.i_s).epsilon(1e-13));
    CHECK(b.i_u == doctest::Approx(lam * lam * a.i_u).epsilon(1e-13));
}

TEST_CASE("temperature transform") {
    const BiasConfiguration c = fx::unit_cfg();
    CHECK(temperature_transform(c, 300, 300) == c);
    const BiasConfiguration hot = temperature_transform(c, 278.15, 318.15);
    CHECK(c.tau_s / hot.tau_s == doctest::Approx(50.0));
    CHECK(hot.sig_f.i_thr / c.sig_f.i_thr == doctest::Approx(50.0));
    CHECK_THROWS_AS(temperature_transform(c, 300, 500), DomainError);
}
