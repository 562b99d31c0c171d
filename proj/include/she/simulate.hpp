#pragma once

// Monte Carlo for the stochastic heat equation on finite grids:
//   u_{k+1} = P_dt u_k + lambda * sigma(u_k) * dB_k,
// with the exact semigroup step P_dt (heat-kernel convolution) and
// Euler-Maruyama noise dB(x) ~ N(0, dt / w_x), independent across sites and
// steps.  Estimates E||u_t||^2 with a path-count standard error.  Reductions
// are index-ordered so results are bit-identical for any thread count.

#include <cstdint>
#include <vector>

#include "she/group.hpp"
#include "she/levy.hpp"
#include "she/sigma.hpp"
#include "she/u0.hpp"
#include "she/version.hpp"

namespace she {

struct SimConfig {
    double lambda = 1.0;
    double t_end = 1.0;
    double dt = 1e-3;         // rounded so that steps * dt_eff == t_end
    long long n_paths = 1000;
    std::uint64_t seed = kDefaultSeed;
    int threads = 0;          // 0 = hardware concurrency
    SigmaFunction sigma_fn = SigmaFunction::Linear;
    SigmaSpec sigma = SigmaSpec::linear(1.0);
    InitialData u0;
    double noise_scale = 1.0; // multiplies every dB; for covariance-doubling checks
};

struct McEstimate {
    double mean = 0.0; // estimate of E||u_t||^2
    double se = 0.0;   // standard error of the mean
    long long n_paths = 0;
    std::uint64_t seed = 0;
    double dt_eff = 0.0;
    long long steps = 0;
};

// Discrete finite groups (jump processes).
McEstimate simulate_energy(const LevyModel& model, const SimConfig& cfg);

// Compact/continuum grids (Torus, RealLine): same engine, grid-aware noise.
McEstimate simulate_grid(const LevyModel& model, const SimConfig& cfg);

// Local-time identity for the weighted occupation field
//   J(x) = 2 * int_0^inf 1{S_s = x} e^{-2s} ds
// of the symmetrized chain S on a finite group:  E sum_x |J(x)|^2 w(x) equals
// the spectral sum  sum_chi w(chi) / (1 + Re Psi(chi)).  The report also
// carries the uncalibrated reference value 2*Upsilon(1) for comparison.
struct LocalTimeReport {
    double lhs = 0.0;             // Monte Carlo estimate of E||J||^2
    double se = 0.0;
    double rhs = 0.0;             // sum_chi w(chi) / (1 + Re Psi(chi))
    double rhs_two_upsilon1 = 0.0;
    bool constant_mismatch = false; // rhs != 2*Upsilon(1) beyond rounding
    bool ok = false;              // |lhs - rhs| <= 3 se (exact when se == 0)
};
LocalTimeReport local_time_identity(const LevyModel& model, long long n_paths, std::uint64_t seed);

// Pushforward invariance under a group automorphism h with modulus 1: solving
// with rates, u0 and noise transported by h must relabel the solution.  The
// two runs share every floating-point operation in transported order, so the
// path difference is exactly zero when the dynamics are equivariant; the
// kernel pushforward error is the independent numeric check that the
// transported generator matches.
struct InvarianceReport {
    double max_abs_path_diff = 0.0;
    double kernel_pushforward_error = 0.0;
    bool ok = false;
};
InvarianceReport invariance_check(const LevyModel& model, const SimConfig& cfg,
                                  const Isomorphism& h);

} // namespace she
