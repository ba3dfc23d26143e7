#include "mfn/presets.hpp"

#include "mfn/analysis.hpp"

#include <utility>

namespace mfn {

namespace {

// Found by a randomized search over all biases, scored by the acceptance
// checks in tests/test_acceptance.cpp. Currents are relative to I_Gf0 = 1 nA.
BiasConfiguration burster_cfg() {
    BiasConfiguration c;
    c.tau_f = 1e-3;
    c.tau_s = 12.53e-3;
    c.tau_u = 0.6;
    c.g_f = 2.211;
    c.g_s = 4.279;
    c.g_u = 1.235;
    c.sig_f = {0.01661e-9, 0.223e-9, 1.0e-9};
    c.sig_s = {0.05889e-9, 0.1926e-9, 0.2161e-9};
    return c;
}

BiasConfiguration spiker_cfg() {
    BiasConfiguration c = burster_cfg();
    c.sig_s.i_gain0 *= 0.5;
    return c;
}

BiasConfiguration resting_cfg() {
    BiasConfiguration c = spiker_cfg();
    c.sig_f.i_gain0 = 0.01e-9;
    return c;
}

NamedPreset make(std::string name, std::string description, BiasConfiguration cfg) {
    const auto in = confirmation_input(classify(cfg), cfg);
    return {std::move(name), std::move(description), cfg, in.value_or(0.0)};
}

std::vector<NamedPreset> build() {
    return {
        make("tonic-spiker", "slow bistability inside the fast one; tonic spiking only", spiker_cfg()),
        make("burster", "slow threshold below the fast one; bursts at moderate input", burster_cfg()),
        make("resting", "weak fast positive feedback; no spikes", resting_cfg()),
    };
}

} // namespace

const std::vector<NamedPreset>& presets() {
    static const std::vector<NamedPreset> table = build();
    return table;
}

std::optional<NamedPreset> find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    return std::nullopt;
}

} // namespace mfn
