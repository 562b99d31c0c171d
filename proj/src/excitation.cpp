#include "she/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "she/bounds.hpp"
#include "she/errors.hpp"
#include "she/spectral.hpp"
#include "she/volterra.hpp"

namespace she {

std::string to_string(SweepSource source) {
    switch (source) {
    case SweepSource::Volterra: return "volterra";
    case SweepSource::LowerBound: return "lower_bound";
    case SweepSource::UpperBound: return "upper_bound";
    case SweepSource::MonteCarlo: return "mc";
    }
    return "?";
}

std::string to_string(DichotomyVerdict verdict) {
    switch (verdict) {
    case DichotomyVerdict::Discrete2: return "discrete_2";
    case DichotomyVerdict::ConnectedAtLeast4: return "connected_ge_4";
    case DichotomyVerdict::StableTheta: return "stable_theta";
    case DichotomyVerdict::Sublinear0: return "sublinear_0";
    case DichotomyVerdict::Unknown: return "unknown";
    }
    return "?";
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("log_spaced: need 0 < lo < hi, n >= 2");
    std::vector<double> grid(static_cast<std::size_t>(n));
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / (n - 1);
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = std::exp(llo + step * i);
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

LambdaSweep sweep(const LevyModel& model, const InitialData& u0, const SigmaSpec& sigma, double t,
                  std::span<const double> lambda_grid, SweepSource source,
                  const SimConfig* mc_config) {
    if (!(t > 0.0)) throw ConfigError("sweep: t must be positive");
    if (lambda_grid.empty()) throw ConfigError("sweep: empty lambda grid");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i)
        if (!(lambda_grid[i] > 0.0) || (i > 0 && !(lambda_grid[i - 1] < lambda_grid[i])))
            throw ConfigError("sweep: lambda grid must be positive and increasing");
    if (source == SweepSource::MonteCarlo && mc_config == nullptr)
        throw ConfigError("sweep: MonteCarlo source needs a SimConfig");

    LambdaSweep out;
    out.t = t;
    out.source = source;
    out.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
    const std::size_t n = out.lambdas.size();
    out.log_energy_sq.assign(n, std::numeric_limits<double>::quiet_NaN());
    out.log_log_energy.assign(n, std::numeric_limits<double>::quiet_NaN());
    out.valid.assign(n, 0);

    const std::vector<double> t_grid{t};
    for (std::size_t i = 0; i < n; ++i) {
        const double lambda = out.lambdas[i];
        double log_e2 = std::numeric_limits<double>::quiet_NaN();
        try {
            switch (source) {
            case SweepSource::Volterra:
                log_e2 = solve_volterra(model, u0, sigma, lambda, t_grid).log_energy_sq.back();
                break;
            case SweepSource::LowerBound:
                log_e2 = lower_bound_series(model, u0, sigma, lambda, t);
                break;
            case SweepSource::UpperBound:
                log_e2 = picard_upper_bound(model, u0, sigma, lambda, t);
                break;
            case SweepSource::MonteCarlo: {
                SimConfig cfg = *mc_config;
                cfg.lambda = lambda;
                cfg.t_end = t;
                cfg.sigma = sigma;
                cfg.u0 = u0;
                const McEstimate est = model.group().discrete() ? simulate_energy(model, cfg)
                                                                : simulate_grid(model, cfg);
                log_e2 = est.mean > 0.0 ? std::log(est.mean)
                                        : std::numeric_limits<double>::quiet_NaN();
                break;
            }
            }
        } catch (const ConfigError&) {
            continue; // out-of-policy lambda: leave a gap
        } catch (const NumericError&) {
            continue; // engine failure at this lambda: leave a gap
        }
        if (!std::isfinite(log_e2)) continue;
        out.log_energy_sq[i] = log_e2;
        if (log_e2 > 0.0) {
            out.log_log_energy[i] = std::log(0.5 * log_e2);
            out.valid[i] = 1;
        }
    }
    return out;
}

IndexEstimate fit_index(const LambdaSweep& sweep, double tail_fraction) {
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
        throw ConfigError("fit_index: tail_fraction must lie in (0,1]");
    const std::size_t n = sweep.lambdas.size();
    const std::size_t window =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(tail_fraction * n)));
    std::vector<double> xs, ys;
    for (std::size_t i = n - window; i < n; ++i) {
        if (!sweep.valid[i]) continue;
        xs.push_back(std::log(sweep.lambdas[i]));
        ys.push_back(sweep.log_log_energy[i]);
    }
    const std::size_t m = xs.size();
    if (m < 5)
        throw NumericError(NumericError::Kind::OutOfRange,
                           "fit_index: fewer than 5 usable points in the tail window");

    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= static_cast<double>(m);
    ybar /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    const double slope = sxy / sxx;
    const double intercept = ybar - slope * xbar;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        rss += r * r;
    }
    IndexEstimate est;
    est.slope = slope;
    est.ci_halfwidth = 2.0 * std::sqrt(rss / static_cast<double>(m - 2) / sxx);
    return est;
}

IndexPrediction predicted_index(const LevyModel& model, const SigmaSpec& sigma) {
    IndexPrediction p;
    const Group& g = model.group();
    if (sigma.kind == SigmaSpec::Kind::Bounded && g.compact()) {
        p.value = 0.0;
        p.rationale = "bounded sigma on a compact group is at most linearly excitable";
        return p;
    }
    const double ell = sigma.ell();
    if (g.discrete() && ell > 0.0) {
        p.value = 2.0;
        p.rationale = "discrete group with linear-growth sigma";
        return p;
    }
    const auto& leaves = model.leaves();
    if (leaves.size() == 1 && leaves.front().exponent_kind == ExponentKind::Stable && ell > 0.0) {
        const double alpha = leaves.front().espec.alpha;
        if (alpha > 1.0 && alpha <= 2.0) {
            p.value = 2.0 * alpha / (alpha - 1.0);
            p.rationale = "stable exponent on the line, theta = 2a/(a-1)";
            return p;
        }
        p.rationale = "stable index <= 1: Dalang condition fails, no finite-energy solution";
        return p;
    }
    p.rationale = "only the general lower bound e >= 4 applies on connected groups";
    return p;
}

LinearExcitationReport linear_excitation_check(const LevyModel& model, const InitialData& u0,
                                               const SigmaSpec& sigma, double t,
                                               std::span<const double> lambda_grid) {
    if (!model.group().compact())
        throw ConfigError("linear_excitation_check: hypothesis violated, group is not compact");
    if (sigma.kind != SigmaSpec::Kind::Bounded || !(sigma.floor > 0.0))
        throw ConfigError(
            "linear_excitation_check: hypothesis violated, sigma must be bounded with floor > 0");
    if (!(t > 0.0)) throw ConfigError("linear_excitation_check: t must be positive");
    if (lambda_grid.empty()) throw ConfigError("linear_excitation_check: empty lambda grid");

    // The two-sided bounds are stated for the probability Haar measure.
    const LevyModel prob(model.group().spec(), model.exponent(), Normalization::CompactProbability);
    const Group& g = prob.group();
    const double inf_u0 = u0_min_abs(u0, g);
    if (!(inf_u0 > 0.0))
        throw ConfigError("linear_excitation_check: hypothesis violated, inf |u0| must be positive");

    const double u0_sq = std::exp(u0_log_norm_sq(u0, g));
    const double ups = upsilon(prob, 1.0 / t);
    const double pint = pbar_integral(prob, t);
    const bool constant_sigma = sigma.floor == sigma.cap;
    const double det_sq = constant_sigma ? std::exp(deterministic_energy(prob, u0, t)) : 0.0;

    LinearExcitationReport rep;
    rep.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
    rep.sup_ratio = 0.0;
    rep.inf_ratio = std::numeric_limits<double>::infinity();
    bool ordered = true;
    for (double lambda : rep.lambdas) {
        if (!(lambda > 0.0)) throw ConfigError("linear_excitation_check: lambdas must be positive");
        const double l2 = lambda * lambda;
        const double upper = u0_sq + std::numbers::e * l2 * sigma.cap * sigma.cap * ups;
        const double lower = inf_u0 * inf_u0 + l2 * sigma.floor * sigma.floor * pint;
        rep.upper_sq.push_back(upper);
        rep.lower_sq.push_back(lower);
        rep.sup_ratio = std::max(rep.sup_ratio, std::sqrt(upper) / lambda);
        rep.inf_ratio = std::min(rep.inf_ratio, std::sqrt(lower) / lambda);
        if (lower > upper * (1.0 + 1e-12)) ordered = false;
        if (constant_sigma) {
            const double exact = det_sq + l2 * sigma.cap * sigma.cap * pint;
            rep.exact_sq.push_back(exact);
            const double tol = 1e-9 * (1.0 + exact);
            if (exact < lower - tol || exact > upper + tol) ordered = false;
        }
    }
    rep.ok = ordered && rep.inf_ratio > 0.0 && std::isfinite(rep.sup_ratio);
    return rep;
}

std::vector<DichotomyRow> dichotomy_report(const std::vector<DichotomyCase>& cases, double t) {
    std::vector<DichotomyRow> rows;
    rows.reserve(cases.size());
    const SigmaSpec sigma = SigmaSpec::linear(1.0);
    for (const auto& c : cases) {
        DichotomyRow row;
        row.id = c.id;
        row.discrete = c.model.group().discrete();
        row.source = row.discrete ? SweepSource::Volterra : SweepSource::LowerBound;
        const std::vector<double> grid =
            row.discrete ? log_spaced(10.0, 1000.0, 13) : log_spaced(1.0, 100.0, 17);
        const LambdaSweep sw = sweep(c.model, c.u0, sigma, t, grid, row.source);
        const IndexEstimate est = fit_index(sw, 0.5);
        row.slope = est.slope;
        row.ci_halfwidth = est.ci_halfwidth;
        row.predicted = predicted_index(c.model, sigma).value;
        if (row.discrete) {
            row.verdict = DichotomyVerdict::Discrete2;
            row.pass = std::abs(row.slope - 2.0) <= 0.2;
        } else {
            row.verdict = row.predicted.has_value() ? DichotomyVerdict::StableTheta
                                                    : DichotomyVerdict::ConnectedAtLeast4;
            row.pass = row.slope >= 3.8;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace she
