#pragma once

// Initial data profiles: the spatial field on the compiled grid, its squared
// Fourier spectrum, and the norms the moment formulas consume.

#include <vector>

#include "she/group.hpp"

namespace she {

struct InitialData {
    enum class Kind { PointMass, ConstantOne, Gaussian } kind = Kind::PointMass;
    double width = 1.0; // Gaussian: exp(-x^2 / (2 width^2))

    static InitialData point_mass() { return {}; }
    static InitialData constant_one() { return {Kind::ConstantOne, 1.0}; }
    static InitialData gaussian(double width) { return {Kind::Gaussian, width}; }
};

// Pointwise field values, one per site.
std::vector<double> u0_field(const InitialData& u0, const Group& g);

// |u0_hat(chi)|^2 per dual point.  PointMass and ConstantOne use the exact
// algebraic spectra; Gaussian uses the continuum closed form evaluated on the
// dual grid (the grid DFT matches it to rounding once the window holds the
// profile, which validation enforces).
std::vector<double> u0_spectrum_sq(const InitialData& u0, const Group& g);

// log ||u0||^2 computed from the spectrum (Plancherel), so that the moment
// curves start at exactly this value at t = 0.
double u0_log_norm_sq(const InitialData& u0, const Group& g);

// inf_x |u0(x)| over the grid; the lower excitation bounds need it positive.
double u0_min_abs(const InitialData& u0, const Group& g);

} // namespace she
