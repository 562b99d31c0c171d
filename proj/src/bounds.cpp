#include "she/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "she/errors.hpp"
#include "she/logsum.hpp"
#include "she/spectral.hpp"

namespace she {

double picard_upper_bound(const LevyModel& model, const InitialData& u0, const SigmaSpec& sigma,
                          double lambda, double t, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw ConfigError("picard_upper_bound: eps must lie in (0,1)");
    if (!(t > 0.0) || !std::isfinite(t))
        throw NumericError(NumericError::Kind::OutOfRange, "picard_upper_bound: t must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("picard_upper_bound: lambda must be nonnegative");
    const double L = sigma.L();
    if (!(L > 0.0)) throw ConfigError("picard_upper_bound: sigma must have a positive Lipschitz bound");

    const double prefactor = 2.0 * std::log((2.0 + eps) / eps);
    const double u0log = u0_log_norm_sq(u0, model.group());
    if (lambda == 0.0) return prefactor + u0log;

    const double y = 1.0 / ((1.0 + eps) * (1.0 + eps) * lambda * lambda * L * L);
    const double beta = upsilon_inverse(model, y);
    return prefactor + u0log + 0.5 * t * beta;
}

namespace {

// c = twice the spectral radius of the part of the dual carrying u0: the full
// dual on finite groups; otherwise the smallest decay-ordered window holding
// half of ||u0_hat||^2.
double spectral_cover_rate(const LevyModel& model, const InitialData& u0) {
    const Group& g = model.group();
    if (g.finite()) return 2.0 * model.max_re_psi();

    const std::vector<double> spec = u0_spectrum_sq(u0, g);
    const auto& re = model.re_psi_grid();
    std::vector<std::size_t> order(g.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return re[a] < re[b]; });
    double total = 0.0;
    for (double v : spec) total += v;
    double cum = 0.0;
    for (std::size_t idx : order) {
        cum += spec[idx];
        if (cum >= 0.5 * total) return 2.0 * re[idx];
    }
    return 2.0 * model.max_re_psi();
}

} // namespace

double lower_bound_series(const LevyModel& model, const InitialData& u0, const SigmaSpec& sigma,
                          double lambda, double t, const LowerBoundOptions& opts) {
    const double ell = sigma.ell();
    if (!(ell > 0.0))
        throw ConfigError("lower_bound_series: sigma must satisfy |sigma(z)| >= ell|z| with ell > 0");
    if (!(t > 0.0) || !std::isfinite(t))
        throw NumericError(NumericError::Kind::OutOfRange, "lower_bound_series: t must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("lower_bound_series: lambda must be nonnegative");

    const double base = u0_log_norm_sq(u0, model.group()) - std::numbers::ln2;
    const double c = spectral_cover_rate(model, u0);
    if (lambda == 0.0) return base - c * t;

    const double log_k = 2.0 * (std::log(lambda) + std::log(ell));
    auto xlog = [&](long long n) {
        return static_cast<double>(n) *
               (log_k + std::log(upsilon(model, static_cast<double>(n) / t)) - 1.0);
    };

    // peak of the (strictly concave in n) log-term sequence
    long long hi = 1;
    while (2 * hi < opts.j_max && xlog(2 * hi) > xlog(hi)) hi *= 2;
    long long lo = std::max(1ll, hi / 2);
    hi = std::min(2 * hi, opts.j_max);
    while (hi - lo > 2) {
        const long long m1 = lo + (hi - lo) / 3;
        const long long m2 = hi - (hi - lo) / 3;
        if (xlog(m1) < xlog(m2)) lo = m1 + 1;
        else hi = m2 - 1;
    }
    long long peak = lo;
    double xpeak = xlog(lo);
    for (long long n = lo + 1; n <= hi; ++n) {
        const double v = xlog(n);
        if (v > xpeak) {
            xpeak = v;
            peak = n;
        }
    }
    xpeak = std::max(xpeak, 0.0); // the n = 0 term is 1

    // band edges where terms fall band_drop below the peak
    const double cutoff = xpeak - opts.band_drop;
    long long left = 1;
    {
        long long a = 1, b = peak;
        while (a < b) { // first n with xlog(n) >= cutoff (xlog rises on [1, peak])
            const long long m = a + (b - a) / 2;
            if (xlog(m) >= cutoff) b = m;
            else a = m + 1;
        }
        left = a;
    }
    long long right = peak;
    {
        long long b = peak;
        while (2 * b < opts.j_max && xlog(2 * b) >= cutoff) b *= 2;
        long long a = b;
        b = std::min(2 * b, opts.j_max);
        while (a < b) { // last n with xlog(n) >= cutoff (xlog falls past the peak)
            const long long m = a + (b - a + 1) / 2;
            if (xlog(m) >= cutoff) a = m;
            else b = m - 1;
        }
        right = a;
    }

    // head: n = 0..64 exactly; band beyond that, strided if necessary
    logdom::LogAccum acc;
    const long long head_end = std::min<long long>(64, opts.j_max);
    acc.add(0.0); // n = 0
    for (long long n = 1; n <= head_end; ++n) acc.add(xlog(n));
    left = std::max(left, head_end + 1);
    if (right >= left) {
        const long long band = right - left + 1;
        const long long stride = std::max(1ll, (band + opts.exact_band - 1) / opts.exact_band);
        logdom::LogAccum bacc;
        for (long long n = left; n <= right; n += stride) bacc.add(xlog(n));
        acc.add(bacc.value() + std::log(static_cast<double>(stride)));
    }
    return base - c * t + acc.value();
}

LemmaFloorResult lemma_sums_floor(int a, double rho, double b) {
    if (a < 0 || !(rho > 0.0) || !(b > 0.0))
        throw ConfigError("lemma_sums_floor: need a >= 0, rho > 0, b > 0");

    auto log_series = [&](double bb) {
        logdom::LogAccum acc;
        const double logb = std::log(bb);
        const double jstar = std::pow(bb, 1.0 / rho) / std::numbers::e;
        double best = logdom::kNegInf;
        for (long long j = a;; ++j) {
            const double lt = j == 0 ? 0.0
                                     : static_cast<double>(j) *
                                           (logb - rho * std::log(static_cast<double>(j)));
            acc.add(lt);
            best = std::max(best, lt);
            if (static_cast<double>(j) > jstar && lt < best - 60.0) break;
            if (j > 100'000'000ll)
                throw NumericError(NumericError::Kind::NotConverged,
                                   "lemma_sums_floor: series did not localize");
        }
        return acc.value();
    };

    LemmaFloorResult res;
    res.log_sum = log_series(b);
    const double rho_e = rho / std::numbers::e;
    const double log_c = log_series(1.0) - rho_e; // calibrated so b = 1 is equality
    res.log_floor = log_c + rho_e * std::pow(b, 1.0 / rho);
    res.holds = res.log_sum >= res.log_floor - 1e-9;
    return res;
}

} // namespace she
