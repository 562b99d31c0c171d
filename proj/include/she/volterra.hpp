#pragma once

// Exact second-moment evolution for linear sigma(z) = ell*z:
//   F(t) = E||u_t||^2 satisfies the renewal (Volterra) equation
//   F(t) = I(t) + (ell*lambda)^2 * int_0^t pbar_{t-s}(0) F(s) ds,
// where I(t) = ||P_t u0||^2 and pbar is the symmetrized return density of the
// driving process on the truncated dual grid.
//
// The solver runs entirely in log space.  Both kernels are exact finite sums
// of exponentials over the dual grid (spectral atoms), so each convolution
// atom carries a scalar state that is advanced exactly under a log-linear
// (geometric) interpolation of F on each step; the step's growth rate is
// resolved by a fixed point.  Steps adapt to the curvature of log F, and the
// whole mesh is re-run at half the step size to certify the discretization.

#include <span>
#include <vector>

#include "she/levy.hpp"
#include "she/sigma.hpp"
#include "she/u0.hpp"

namespace she {

struct EnergyCurve {
    std::vector<double> t_grid;        // includes t = 0
    std::vector<double> log_energy_sq; // log F at the grid nodes
    double lambda = 0.0;
    double sigma_slope = 0.0;
};

struct VolterraOptions {
    double curvature_budget = 2e-5; // total log-accuracy target from the interpolant
    bool certify_with_halving = true;
    double halving_tolerance = 1e-4;
    int max_fixed_point_iters = 100;
};

EnergyCurve solve_volterra(const LevyModel& model, const InitialData& u0, const SigmaSpec& sigma,
                           double lambda, std::span<const double> t_grid,
                           const VolterraOptions& opts = {});

// log ||P_t u0||^2: the lambda = 0 energy, an exact spectral sum.
double deterministic_energy(const LevyModel& model, const InitialData& u0, double t);

// N_beta(F) = sup_t exp(log F(t)/2 - beta t) over the curve's grid; flags the
// sup as untrustworthy when it is still climbing at the last node.
struct NBetaResult {
    double value = 0.0;
    bool not_converged = false;
};
NBetaResult nbeta_norm(const EnergyCurve& curve, double beta);

} // namespace she
