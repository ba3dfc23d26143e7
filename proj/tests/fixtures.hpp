#pragma once

#include "mfn/model.hpp"

namespace fx {

constexpr double nA = 1e-9;

// Linear filter chain: both sigmoids off, unit gains.
inline mfn::BiasConfiguration linear_cfg() {
    mfn::BiasConfiguration c;
    c.sig_f = {1 * nA, 1 * nA, 0.0};
    c.sig_s = {1 * nA, 1 * nA, 0.0};
    return c;
}

// Unit gains, strong fast feedback: the fast curve folds.
inline mfn::BiasConfiguration unit_cfg() {
    mfn::BiasConfiguration c;
    c.sig_f = {0.2 * nA, 0.5 * nA, 2.0 * nA};
    c.sig_s = {0.1 * nA, 0.5 * nA, 1.0 * nA};
    return c;
}

} // namespace fx
