#pragma once

#include "virusperiod/virusperiod.hpp"

namespace fixtures {

using namespace virusperiod;

inline CoefficientSet c0() { return CoefficientSet::constants(1.0, 1.0, 0.1, 0.1, 0.1, 0.2, 0.2, 0.1, 0.3, 0.2, 0.1); }

// b(t) = 1 + 0.5 sin 2 pi t, everything else as c0.
inline CoefficientSet sinusoidal_b() {
    auto c = c0();
    c.b = PeriodicFn::fourier(1.0, 1.0, {{0.0, 0.5}});
    return c;
}

inline CoefficientSet zeros() { return CoefficientSet::constants(1.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0); }

// Only gamma2 varies (0.3 + 0.29 sin 2 pi t). The hypothesis left side peaks
// at t = 1/4 near 0.46 while the right side bottoms out at t = 3/4 near 0.21.
inline CoefficientSet hypothesis_violating() {
    auto c = c0();
    c.gamma2 = PeriodicFn::fourier(1.0, 0.3, {{0.0, 0.29}});
    return c;
}

inline Model model(const CoefficientSet& c) { return Model{c, ADecay::alpha2}; }

}  // namespace fixtures
