#pragma once

// Multiplicative nonlinearities sigma and the small catalog of concrete
// functions the simulator can evaluate pointwise.  The analytic layer only
// consumes the envelope constants:
//   L        — Lipschitz bound, |sigma(a) - sigma(b)| <= L |a - b|
//   ell      — lower linear-growth bound, |sigma(z)| >= ell |z|
//   cap/floor — sup / inf of |sigma| for bounded kinds.

#include <algorithm>
#include <cmath>

#include "she/errors.hpp"

namespace she {

struct SigmaSpec {
    enum class Kind { Linear, Bounded, GeneralLipschitz } kind = Kind::Linear;
    double slope = 1.0;     // Linear: sigma(z) = slope * z
    double cap = 1.0;       // Bounded: sup |sigma|
    double floor = 0.0;     // Bounded: inf |sigma|
    double lipschitz = 1.0; // Bounded / GeneralLipschitz: L
    double inf_ratio = 0.0; // GeneralLipschitz: ell

    static SigmaSpec linear(double slope) {
        SigmaSpec s;
        s.kind = Kind::Linear;
        s.slope = slope;
        s.lipschitz = slope;
        s.inf_ratio = slope;
        return s;
    }
    static SigmaSpec bounded(double cap, double floor, double lipschitz = 1.0) {
        if (!(cap > 0.0) || floor < 0.0 || floor > cap)
            throw ConfigError("bounded sigma needs 0 <= floor <= cap, cap > 0");
        SigmaSpec s;
        s.kind = Kind::Bounded;
        s.cap = cap;
        s.floor = floor;
        s.lipschitz = lipschitz;
        s.inf_ratio = 0.0;
        return s;
    }
    static SigmaSpec general(double lipschitz, double inf_ratio) {
        if (!(lipschitz > 0.0) || inf_ratio < 0.0 || inf_ratio > lipschitz)
            throw ConfigError("general sigma needs 0 <= ell <= L, L > 0");
        SigmaSpec s;
        s.kind = Kind::GeneralLipschitz;
        s.lipschitz = lipschitz;
        s.inf_ratio = inf_ratio;
        return s;
    }

    double L() const { return kind == Kind::Linear ? slope : lipschitz; }
    double ell() const { return kind == Kind::Linear ? slope : inf_ratio; }
};

// Concrete pointwise functions for the Monte Carlo layer.
enum class SigmaFunction { Linear, AffineBounded, SinPlusSlope };

// Global minimum of sin(z)/z, attained at the first positive root of
// tan z = z (z ~ 4.4934095); enters the sin-plus-slope envelope.
inline constexpr double kMinSinc = -0.21723362821122166;

inline double sigma_eval(SigmaFunction fn, const SigmaSpec& spec, double z) {
    switch (fn) {
    case SigmaFunction::Linear:
        return spec.slope * z;
    case SigmaFunction::AffineBounded:
        return std::clamp(z, spec.floor, spec.cap);
    case SigmaFunction::SinPlusSlope:
        return spec.slope * (z + 0.5 * std::sin(z));
    }
    return 0.0;
}

// Envelope constants of a catalog function, for feeding the analytic layer.
inline SigmaSpec sigma_envelope(SigmaFunction fn, double slope, double cap, double floor) {
    switch (fn) {
    case SigmaFunction::Linear:
        return SigmaSpec::linear(slope);
    case SigmaFunction::AffineBounded:
        // clamp(z, floor, cap): 1-Lipschitz, values in [floor, cap], ell = 0
        return SigmaSpec::bounded(cap, floor, 1.0);
    case SigmaFunction::SinPlusSlope: {
        // slope*(z + sin(z)/2): L = 1.5*slope, |sigma(z)/z| >= 1 + kMinSinc/2
        SigmaSpec s = SigmaSpec::general(1.5 * slope, slope * (1.0 + 0.5 * kMinSinc));
        s.slope = slope;
        return s;
    }
    }
    return SigmaSpec::linear(slope);
}

} // namespace she
