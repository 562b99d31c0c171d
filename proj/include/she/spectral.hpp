#pragma once

// Spectral quantities of the semigroup: heat kernels on the compiled grid,
// the return density pbar_t(0) = ||p_{t/2}||^2, its time integral, and the
// resolvent-type transform
//     Upsilon(beta) = integral over the dual of  m(d chi) / (beta + 2 Re Psi(chi)),
// together with the Dalang finiteness check, the tauberian sandwich
//     (1/e) Upsilon(1/t) <= integral_0^t pbar_s(0) ds <= e * Upsilon(1/t),
// and the projection comparison Upsilon_proj <= Upsilon_full for products.

#include <optional>
#include <span>
#include <vector>

#include "she/levy.hpp"

namespace she {

enum class DalangVerdict { Holds, Fails, HoldsByDiscreteness };

DalangVerdict dalang_check(const LevyModel& model);
bool dalang_ok(const LevyModel& model);

// Heat kernel p_t on the compiled grid, one value per site.  Validates that
// the dual truncation resolves e^{-t Re Psi} and that the result is a
// (weighted) probability density up to rounding.
std::vector<double> heat_kernel(const LevyModel& model, double t);

// pbar_t(0): exact finite sum on finite duals, closed forms for Stable and
// TorusBrownian factors (Gamma function / Jacobi theta), products multiply.
double pbar0(const LevyModel& model, double t);

// integral_0^t pbar_s(0) ds; exact on finite duals, closed form for a single
// Stable factor, adaptive quadrature with a power substitution otherwise.
double pbar_integral(const LevyModel& model, double t);

// Upsilon(beta) for beta > 0.  Throws NumericError(NonFinite) when the dual
// integral diverges (Dalang fails).  Continuum factors use closed forms, the
// finite part is enumerated exactly.
double upsilon(const LevyModel& model, double beta);

// Upsilon evaluated as a plain weighted sum over the truncated dual grid.
// This is the quantity the Volterra and simulation grids actually see.
double upsilon_truncated(const LevyModel& model, double beta);

// Inverse of beta -> Upsilon(beta) by bisection on [1e-15, 1e30].
double upsilon_inverse(const LevyModel& model, double y);

struct UpsilonProfile {
    std::vector<double> beta;
    std::vector<double> value;
    bool dalang_finite = true;
};
UpsilonProfile upsilon_profile(const LevyModel& model, double beta_min, double beta_max, int points);

struct TauberianReport {
    double t = 0.0;
    double lower = 0.0;  // (1/e) Upsilon(1/t)
    double middle = 0.0; // integral_0^t pbar_s(0) ds
    double upper = 0.0;  // e Upsilon(1/t)
    bool ok = false;
};
TauberianReport tauberian_check(const LevyModel& model, double t);

// For a product model G x K with every trailing factor compact, compares
// Upsilon of the first factor against Upsilon of the whole product, both on
// the product's truncated dual.  Finite K factors are weighted by their
// probability Haar measure (mass-one dual side), which is the normalization
// under which the comparison is scale-free.
struct ProjectionReport {
    std::vector<double> beta;
    std::vector<double> upsilon_proj;
    std::vector<double> upsilon_full;
    bool ok = false;
};
ProjectionReport projection_compare(const LevyModel& product_model, std::span<const double> beta_grid);

// Decay atoms of the truncated dual: sorted distinct rates a = 2 Re Psi with
// log of the total dual weight carried at each rate.  This is the exact
// spectral content of the grid kernel; the Volterra solver runs on it.
struct SpectralAtoms {
    std::vector<double> rate;
    std::vector<double> log_weight;
};
SpectralAtoms spectral_atoms(const LevyModel& model);

// Same merge, with caller-supplied per-character log weights (e.g. including
// |u0_hat|^2).  Entries with log weight -inf are dropped.
SpectralAtoms weighted_atoms(const LevyModel& model, std::span<const double> log_weights);

} // namespace she
