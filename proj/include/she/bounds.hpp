#pragma once

// Analytic moment bounds that sandwich the Volterra/Monte Carlo energy:
//
//  * picard_upper_bound — Picard-iteration contraction bound
//        log E||u_t||^2 <= log((2+eps)^2/eps^2) + log ||u0||^2
//                          + (t/2) * UpsilonInverse(1 / ((1+eps)^2 lambda^2 L^2)),
//    valid whenever the contraction root exists.
//
//  * lower_bound_series — spectral chaos series floor for ell > 0:
//        log E||u_t||^2 >= log(||u0||^2 / 2) - c t
//                          + log sum_{n>=0} (ell^2 lambda^2 Upsilon(n/t) / e)^n,
//    where c twice-covers the spectral support of u0 (full dual maximum of
//    2 Re Psi on finite groups; the smallest centered window holding half of
//    ||u0_hat||^2 otherwise).  The term sequence is unimodal; the sum is taken
//    over the peak band with a stride correction when the band is huge.
//
//  * lemma_sums_floor — the elementary series floor
//        S(a, rho, b) = sum_{j>=a} (b / j^rho)^j >= c(a, rho) exp(rho/e * b^{1/rho})
//    with the constant calibrated at b = 1.

#include <optional>

#include "she/levy.hpp"
#include "she/sigma.hpp"
#include "she/u0.hpp"

namespace she {

// Returns log of the bound on E||u_t||^2.
double picard_upper_bound(const LevyModel& model, const InitialData& u0, const SigmaSpec& sigma,
                          double lambda, double t, double eps = 0.5);

struct LowerBoundOptions {
    long long j_max = 2'000'000'000'000'000'000ll; // hard cap on the term index
    double band_drop = 46.0;                       // ignore terms below peak - drop (log scale)
    long long exact_band = 2'000'000;              // enumerate bands up to this size
};

// Returns log of the lower bound on E||u_t||^2.
double lower_bound_series(const LevyModel& model, const InitialData& u0, const SigmaSpec& sigma,
                          double lambda, double t, const LowerBoundOptions& opts = {});

struct LemmaFloorResult {
    double log_sum = 0.0;   // log S(a, rho, b)
    double log_floor = 0.0; // log c(a, rho) + (rho/e) b^{1/rho}
    bool holds = false;
};
LemmaFloorResult lemma_sums_floor(int a, double rho, double b);

} // namespace she
