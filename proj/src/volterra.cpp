#include "she/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "she/errors.hpp"
#include "she/logsum.hpp"
#include "she/spectral.hpp"

namespace she {

namespace {

using logdom::dlog_phi_exp;
using logdom::kNegInf;
using logdom::log_phi_exp;
using logdom::LogAccum;
using logdom::lse2;

struct Atoms {
    std::vector<double> rate;
    std::vector<double> lw;
};

Atoms kernel_atoms(const LevyModel& model) {
    SpectralAtoms sa = spectral_atoms(model);
    return {std::move(sa.rate), std::move(sa.log_weight)};
}

Atoms initial_atoms(const LevyModel& model, const InitialData& u0) {
    const Group& g = model.group();
    const std::vector<double> spec = u0_spectrum_sq(u0, g);
    const double lw = std::log(g.dual_weight());
    std::vector<double> logw(g.size(), kNegInf);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (spec[k] > 0.0) logw[k] = lw + std::log(spec[k]);
    SpectralAtoms sa = weighted_atoms(model, logw);
    return {std::move(sa.rate), std::move(sa.log_weight)};
}

double log_exp_sum(const Atoms& at, double t) {
    LogAccum acc;
    for (std::size_t i = 0; i < at.rate.size(); ++i) acc.add(at.lw[i] - at.rate[i] * t);
    return acc.value();
}

// One full product-integration pass over [0, t_end] landing exactly on the
// report nodes.  When `forced` is non-null it replays that mesh with every
// step halved (the discretization certificate).
struct PassResult {
    std::vector<double> node_logF;              // one per node, including t = 0
    std::vector<std::vector<double>> mesh;      // committed step sizes per segment
};

class Solver {
public:
    Solver(Atoms kernel, Atoms init, double log_k_coef, const VolterraOptions& opts)
        : ker_(std::move(kernel)), ini_(std::move(init)), log_k_(log_k_coef), opts_(opts) {}

    PassResult run(std::span<const double> nodes, const PassResult* forced) const {
        PassResult out;
        out.node_logF.push_back(log_exp_sum(ini_, 0.0));
        out.mesh.resize(nodes.size());

        const double t_end = nodes.back();
        const double eps_rate = opts_.curvature_budget / t_end;

        std::vector<double> C(ker_.rate.size(), kNegInf);
        double logF = out.node_logF[0];

        // initial growth-rate estimate: d/dt log F at 0+
        double g = std::exp(log_k_ + log_exp_sum(ker_, 0.0)) - mean_rate(ini_);

        const double a_max = ker_.rate.empty() ? 0.0 : ker_.rate.back();
        double suggest = std::min(0.5 / std::max({std::abs(g), a_max, 1.0 / t_end}), t_end / 64.0);

        double t = 0.0;
        std::vector<double> cand(ker_.rate.size());
        std::vector<double> tnew(ker_.rate.size());
        for (std::size_t seg = 0; seg < nodes.size(); ++seg) {
            const double node = nodes[seg];
            std::size_t forced_pos = 0;
            bool more = true;
            while (more) {
                double h;
                if (forced) {
                    h = 0.5 * forced->mesh[seg][forced_pos / 2];
                    more = ++forced_pos < 2 * forced->mesh[seg].size();
                } else {
                    const double remaining = node - t;
                    h = std::min(suggest, remaining);
                    if (h >= 0.75 * remaining) h = remaining;
                    more = h < remaining;
                    out.mesh[seg].push_back(h);
                }

                // Solve the step's growth-rate equation g = G(g) by safeguarded
                // Newton.  G is smooth and increasing with G' = w_K * sum_i
                // softmax_i * (log phi)'((g + a_i) h) strictly below 1, so
                // psi(g) = G(g) - g is strictly decreasing with a unique root and
                // the Newton correction psi / (1 - G') never divides by zero.
                const double logI_next = log_exp_sum(ini_, t + h);
                const double logh = std::log(h);
                double logF1 = kNegInf;
                double g_it = g;
                bool converged = false;
                for (int it = 0; it < opts_.max_fixed_point_iters; ++it) {
                    LogAccum acc;
                    for (std::size_t i = 0; i < ker_.rate.size(); ++i) {
                        const double a = ker_.rate[i];
                        tnew[i] = logF - a * h + logh + log_phi_exp((g_it + a) * h);
                        cand[i] = lse2(C[i] - a * h, tnew[i]);
                        acc.add(ker_.lw[i] + cand[i]);
                    }
                    const double logA = acc.value();
                    const double next = lse2(logI_next, log_k_ + logA);
                    if (std::abs(next - logF1) < 5e-13) {
                        logF1 = next;
                        converged = true;
                        break;
                    }
                    logF1 = next;
                    // dA/dg: the cand branch weights collapse, leaving the fresh terms
                    double slope_sum = 0.0;
                    for (std::size_t i = 0; i < ker_.rate.size(); ++i)
                        slope_sum += std::exp(ker_.lw[i] + tnew[i] - logA) *
                                     dlog_phi_exp((g_it + ker_.rate[i]) * h);
                    const double w_kernel = std::exp(log_k_ + logA - next);
                    const double gprime = w_kernel * slope_sum; // dG/dg in [0, 1)
                    const double psi = (next - logF) / h - g_it;
                    double step = psi / (1.0 - gprime);
                    // keep (g + a) h within a few e-folds per iteration
                    const double clamp = 6.0 / h;
                    if (!(std::fabs(step) <= clamp)) step = std::copysign(clamp, psi);
                    g_it += step;
                    if (!std::isfinite(g_it)) g_it = (logF1 - logF) / h;
                }
                if (!converged)
                    throw NumericError(NumericError::Kind::NotConverged,
                                       "Volterra step growth-rate solve did not converge");
                g_it = (logF1 - logF) / h; // realized average growth of the committed step

                C = cand;
                logF = logF1;
                t += h;
                const double curv = std::abs(g_it - g) / h;
                g = g_it;

                if (!forced) {
                    double next_h = 2.0 * h;
                    if (curv > 0.0) next_h = std::min(next_h, 8.0 * eps_rate / curv);
                    // the exponential-weight quadrature is exact for constant g, so
                    // the growth cap only needs to keep the Newton solve well
                    // conditioned ((log phi)'(4) ~ 0.76), not to resolve e^{gt}
                    next_h = std::min(next_h, 4.0 / std::max(std::abs(g), 1e-300));
                    suggest = std::max(next_h, 1e-14 * t_end);
                }
            }
            t = node;
            out.node_logF.push_back(logF);
        }
        return out;
    }

private:
    static double mean_rate(const Atoms& at) {
        double lmax = kNegInf;
        for (double v : at.lw) lmax = std::max(lmax, v);
        double sw = 0.0, swa = 0.0;
        for (std::size_t i = 0; i < at.rate.size(); ++i) {
            const double e = std::exp(at.lw[i] - lmax);
            sw += e;
            swa += e * at.rate[i];
        }
        return sw > 0.0 ? swa / sw : 0.0;
    }

    Atoms ker_;
    Atoms ini_;
    double log_k_;
    const VolterraOptions& opts_;
};

void validate_grid(std::span<const double> t_grid) {
    if (t_grid.empty()) throw ConfigError("t_grid must be nonempty");
    double prev = 0.0;
    for (double t : t_grid) {
        if (!(t > prev) || !std::isfinite(t))
            throw ConfigError("t_grid must be finite, positive and strictly increasing");
        prev = t;
    }
}

} // namespace

EnergyCurve solve_volterra(const LevyModel& model, const InitialData& u0, const SigmaSpec& sigma,
                           double lambda, std::span<const double> t_grid,
                           const VolterraOptions& opts) {
    if (sigma.kind != SigmaSpec::Kind::Linear)
        throw ConfigError("solve_volterra needs a Linear sigma; "
                          "non-linear moments are only bracketed, not solved");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw ConfigError("lambda must be finite and nonnegative");
    validate_grid(t_grid);

    EnergyCurve curve;
    curve.lambda = lambda;
    curve.sigma_slope = sigma.slope;
    curve.t_grid.push_back(0.0);
    for (double t : t_grid) curve.t_grid.push_back(t);

    const double ell = sigma.slope;
    if (lambda * ell == 0.0) {
        // the convolution term vanishes; the spectral sum is exact
        curve.log_energy_sq.push_back(deterministic_energy(model, u0, 0.0));
        for (double t : t_grid) curve.log_energy_sq.push_back(deterministic_energy(model, u0, t));
        return curve;
    }

    // On continuum groups the discretized kernel sum only approximates the true
    // second moment when the Dalang integral converges; otherwise the "solution"
    // grows without bound as the grid is refined, so refuse rather than report it.
    if (!model.group().discrete() && !dalang_ok(model))
        throw NumericError(NumericError::Kind::NonFinite,
                           "Dalang condition fails: the second moment is infinite "
                           "at every positive time for this model");

    const double log_k = 2.0 * (std::log(lambda) + std::log(ell));
    Solver solver(kernel_atoms(model), initial_atoms(model, u0), log_k, opts);

    PassResult coarse = solver.run(t_grid, nullptr);
    if (!opts.certify_with_halving) {
        curve.log_energy_sq = std::move(coarse.node_logF);
        return curve;
    }
    PassResult fine = solver.run(t_grid, &coarse);
    const double drift = std::abs(fine.node_logF.back() - coarse.node_logF.back());
    if (drift > opts.halving_tolerance)
        throw NumericError(NumericError::Kind::GridTooCoarse,
                           "halving the Volterra mesh moved log F(t_end) by " +
                               std::to_string(drift) + " (tolerance " +
                               std::to_string(opts.halving_tolerance) + ")");
    curve.log_energy_sq = std::move(fine.node_logF);
    return curve;
}

double deterministic_energy(const LevyModel& model, const InitialData& u0, double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw NumericError(NumericError::Kind::OutOfRange,
                           "deterministic_energy: t must be nonnegative");
    return log_exp_sum(initial_atoms(model, u0), t);
}

NBetaResult nbeta_norm(const EnergyCurve& curve, double beta) {
    if (curve.t_grid.size() != curve.log_energy_sq.size() || curve.t_grid.empty())
        throw ConfigError("nbeta_norm: malformed energy curve");
    NBetaResult res;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
        const double phi = 0.5 * curve.log_energy_sq[i] - beta * curve.t_grid[i];
        if (phi > best) {
            best = phi;
            arg = i;
        }
    }
    res.value = std::exp(best);
    const std::size_t last = curve.t_grid.size() - 1;
    res.not_converged = (arg == last) && last > 0 &&
                        0.5 * curve.log_energy_sq[last] - beta * curve.t_grid[last] >
                            0.5 * curve.log_energy_sq[last - 1] - beta * curve.t_grid[last - 1];
    return res;
}

} // namespace she
