#pragma once

// Excitation-index machinery: lambda sweeps of the energy from any of the
// engines (Volterra, analytic lower/upper bounds, Monte Carlo), least-squares
// index fits of log log E_t(lambda) against log lambda, the theorems'
// predicted indices, the bounded-sigma linear-excitation check, and the
// discrete-vs-connected dichotomy table.

#include <optional>
#include <string>
#include <vector>

#include "she/levy.hpp"
#include "she/sigma.hpp"
#include "she/simulate.hpp"
#include "she/u0.hpp"

namespace she {

enum class SweepSource { Volterra, LowerBound, UpperBound, MonteCarlo };

std::string to_string(SweepSource source);

// One energy value per lambda.  E_t(lambda) = sqrt(E||u_t||^2); the fitted
// ordinate is log log E = log(log_energy_sq / 2), defined only when
// log_energy_sq > 0.  Failed or undefined entries are gaps (valid = false),
// never fabricated values.
struct LambdaSweep {
    std::vector<double> lambdas;
    std::vector<double> log_energy_sq;
    std::vector<double> log_log_energy;
    std::vector<char> valid;
    double t = 0.0;
    SweepSource source = SweepSource::Volterra;
};

// mc_config supplies paths/dt/seed for the MonteCarlo source (required there,
// ignored elsewhere); its lambda/t_end/sigma/u0 fields are overridden per
// sweep point.
LambdaSweep sweep(const LevyModel& model, const InitialData& u0, const SigmaSpec& sigma, double t,
                  std::span<const double> lambda_grid, SweepSource source,
                  const SimConfig* mc_config = nullptr);

enum class DichotomyVerdict { Discrete2, ConnectedAtLeast4, StableTheta, Sublinear0, Unknown };

std::string to_string(DichotomyVerdict verdict);

struct IndexEstimate {
    double slope = 0.0;
    double ci_halfwidth = 0.0; // 2x residual-based standard error of the slope
    std::optional<double> predicted;
    DichotomyVerdict verdict = DichotomyVerdict::Unknown;
};

// Least-squares slope over the top tail_fraction of the grid; needs >= 5
// usable points there.
IndexEstimate fit_index(const LambdaSweep& sweep, double tail_fraction = 0.5);

// The cases with a proven exact index; absent otherwise, with the reason.
struct IndexPrediction {
    std::optional<double> value;
    std::string rationale;
};
IndexPrediction predicted_index(const LevyModel& model, const SigmaSpec& sigma);

// Bounded sigma on a compact group grows at most (and, with floor > 0 and
// inf|u0| > 0, at least) linearly in lambda:
//   E^2 <= ||u0||^2 + e lambda^2 cap^2 Upsilon(1/t)       (upper)
//   E^2 >= inf|u0|^2 + lambda^2 floor^2 int_0^t pbar_s(0) ds   (lower),
// under the probability Haar normalization.  When floor == cap the energy is
// exact: E^2 = ||P_t u0||^2 + lambda^2 cap^2 int_0^t pbar_s(0) ds.
struct LinearExcitationReport {
    std::vector<double> lambdas;
    std::vector<double> upper_sq;
    std::vector<double> lower_sq;
    std::vector<double> exact_sq; // empty unless sigma is constant
    double sup_ratio = 0.0;       // max over the grid of sqrt(upper)/lambda
    double inf_ratio = 0.0;       // min over the grid of sqrt(lower)/lambda
    bool ok = false;
};
LinearExcitationReport linear_excitation_check(const LevyModel& model, const InitialData& u0,
                                               const SigmaSpec& sigma, double t,
                                               std::span<const double> lambda_grid);

// Dichotomy table: discrete models fit a Volterra sweep (lambda in [10, 1e3]),
// connected models fit the lower-bound series sweep (lambda in [1, 1e2]); the
// verdict passes when |slope - 2| <= 0.2 (discrete) or slope >= 3.8
// (connected).
struct DichotomyCase {
    std::string id;
    LevyModel model;
    InitialData u0;
};

struct DichotomyRow {
    std::string id;
    bool discrete = false;
    SweepSource source = SweepSource::Volterra;
    double slope = 0.0;
    double ci_halfwidth = 0.0;
    std::optional<double> predicted;
    DichotomyVerdict verdict = DichotomyVerdict::Unknown;
    bool pass = false;
};

std::vector<DichotomyRow> dichotomy_report(const std::vector<DichotomyCase>& cases, double t = 1.0);

// log-spaced grid helper shared by sweeps and the CLI.
std::vector<double> log_spaced(double lo, double hi, int n);

} // namespace she
