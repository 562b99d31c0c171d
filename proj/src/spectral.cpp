#include "she/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "she/errors.hpp"
#include "she/logsum.hpp"
#include "she/quadrature.hpp"

namespace she {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Closed forms for the two continuum factor types.
//
// Stable on the line, Psi(xi) = |xi|^alpha, dual measure dxi/(2*pi):
//   Upsilon(beta) = (1/pi) int_0^inf dxi/(beta + 2 xi^alpha)
//                 = (beta/2)^(1/alpha) / (alpha * beta * sin(pi/alpha)),
//   finite iff alpha > 1;
//   pbar_t(0)     = (1/pi) Gamma(1 + 1/alpha) (2t)^(-1/alpha);
//   int_0^t pbar  = (1/pi) Gamma(1 + 1/alpha) 2^(-1/alpha)
//                   * alpha/(alpha-1) * t^((alpha-1)/alpha),   alpha > 1.
//
// Brownian motion on the circle, Psi(n) = kappa (2 pi n)^2, counting measure
// on the dual Z.  With gamma = 8 pi^2 kappa (so 2 Re Psi at frequency n decays
// at rate gamma n^2):
//   Upsilon(beta) = sum_n 1/(beta + gamma n^2)
//                 = (pi / sqrt(gamma beta)) coth(pi sqrt(beta/gamma)),
//   pbar_t(0)     = sum_n exp(-gamma t n^2)   (Jacobi theta, Poisson-switched).
// ---------------------------------------------------------------------------

double stable_upsilon(double alpha, double beta) {
    return std::pow(beta / 2.0, 1.0 / alpha) / (alpha * beta * std::sin(kPi / alpha));
}

double stable_pbar0(double alpha, double t) {
    return std::tgamma(1.0 + 1.0 / alpha) / kPi * std::pow(2.0 * t, -1.0 / alpha);
}

double stable_pbar_integral(double alpha, double t) {
    return std::tgamma(1.0 + 1.0 / alpha) / kPi * std::pow(2.0, -1.0 / alpha) * alpha /
           (alpha - 1.0) * std::pow(t, (alpha - 1.0) / alpha);
}

// sum_{n in Z} exp(-x n^2) for x > 0; the Poisson switch keeps the direct sum
// short on both sides of x = pi.
double theta_sum(double x) {
    if (x < kPi) return std::sqrt(kPi / x) * theta_sum(kPi * kPi / x);
    double sum = 1.0;
    for (int n = 1;; ++n) {
        const double term = std::exp(-x * static_cast<double>(n) * n);
        sum += 2.0 * term;
        if (term < 1e-18) break;
    }
    return sum;
}

double torus_upsilon(double kappa, double beta) {
    const double gamma = 8.0 * kPi * kPi * kappa;
    const double z = kPi * std::sqrt(beta / gamma);
    return kPi / (std::sqrt(gamma * beta) * std::tanh(z));
}

double torus_pbar0(double kappa, double t) { return theta_sum(8.0 * kPi * kPi * kappa * t); }

// Divergence weight of a leaf: the dual-volume growth exponent relative to the
// decay of 1/(2 Re Psi) in the tail.  The Dalang integral over a product
// converges iff every continuum leaf has finite weight and the weights sum to
// strictly less than 1.
double leaf_divergence_weight(const LevyModel::Leaf& leaf) {
    if (!leaf.continuum) return 0.0;
    switch (leaf.exponent_kind) {
    case ExponentKind::Stable: return 1.0 / leaf.espec.alpha;
    case ExponentKind::TorusBrownian: return 0.5;
    default: return std::numeric_limits<double>::infinity(); // constant process
    }
}

double total_divergence_weight(const LevyModel& model) {
    double sum = 0.0;
    for (const auto& leaf : model.leaves()) sum += leaf_divergence_weight(leaf);
    return sum;
}

// The single continuum leaf of a Dalang-finite model, if any.
const LevyModel::Leaf* continuum_leaf(const LevyModel& model) {
    for (const auto& leaf : model.leaves())
        if (leaf.continuum) return &leaf;
    return nullptr;
}

double cont_upsilon(const LevyModel::Leaf& leaf, double beta) {
    switch (leaf.exponent_kind) {
    case ExponentKind::Stable: return stable_upsilon(leaf.espec.alpha, beta);
    case ExponentKind::TorusBrownian: return torus_upsilon(leaf.espec.rate, beta);
    default:
        throw NumericError(NumericError::Kind::NonFinite,
                           "dual integral diverges for a constant continuum factor");
    }
}

double cont_pbar0(const LevyModel::Leaf& leaf, double t) {
    switch (leaf.exponent_kind) {
    case ExponentKind::Stable: return stable_pbar0(leaf.espec.alpha, t);
    case ExponentKind::TorusBrownian: return torus_pbar0(leaf.espec.rate, t);
    default:
        throw NumericError(NumericError::Kind::NonFinite,
                           "return density diverges for a constant continuum factor");
    }
}

// Exact enumeration of the discrete leaves' joint dual: decay rates
// a = 2 Re Psi (discrete part only) with linear dual weights.  Continuum
// leaves enter through the closed forms above.
struct FinitePart {
    std::vector<double> rate;
    std::vector<double> weight;
};

FinitePart finite_part(const LevyModel& model) {
    const auto& axes = model.group().axes();
    std::vector<std::size_t> daxes;
    std::vector<const LevyModel::Leaf*> dleaves;
    for (const auto& leaf : model.leaves()) {
        if (leaf.continuum) continue;
        dleaves.push_back(&leaf);
        for (std::size_t a = leaf.axis_begin; a < leaf.axis_end; ++a) daxes.push_back(a);
    }
    std::vector<int> digits(axes.size(), 0);
    FinitePart fp;
    for (;;) {
        double w = 1.0;
        for (std::size_t a : daxes) w *= axes[a].w_xi;
        double re = 0.0;
        for (const auto* leaf : dleaves) re += model.psi_leaf(*leaf, digits).real();
        fp.rate.push_back(2.0 * re);
        fp.weight.push_back(w);
        std::size_t pos = 0;
        for (; pos < daxes.size(); ++pos) {
            if (++digits[daxes[pos]] < axes[daxes[pos]].m) break;
            digits[daxes[pos]] = 0;
        }
        if (pos == daxes.size()) break;
    }
    return fp;
}

void require_positive_t(double t, const char* who) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw NumericError(NumericError::Kind::OutOfRange, std::string(who) + ": t must be positive");
}

} // namespace

DalangVerdict dalang_check(const LevyModel& model) {
    if (model.group().discrete()) return DalangVerdict::HoldsByDiscreteness;
    return total_divergence_weight(model) < 1.0 ? DalangVerdict::Holds : DalangVerdict::Fails;
}

bool dalang_ok(const LevyModel& model) { return dalang_check(model) != DalangVerdict::Fails; }

std::vector<double> heat_kernel(const LevyModel& model, double t) {
    require_positive_t(t, "heat_kernel");
    const Group& g = model.group();
    const auto& axes = g.axes();

    // The truncated dual must resolve the decay of exp(-2 t Re Psi); on finite
    // groups the dual is complete and no check is needed.
    if (model.continuum_leaf_count() > 0 && 2.0 * t * model.max_re_psi() < 36.8)
        throw NumericError(NumericError::Kind::GridTooCoarse,
                           "dual truncation does not resolve exp(-2 t Re Psi) at this t; "
                           "increase the grid resolution or the time");

    const std::size_t M = g.size();
    std::vector<double> p(M, 0.0);

    // When every leaf is a single axis (or constant), Psi splits across axes and
    // the kernel is an outer product of 1-D kernels: O(sum m_i^2) instead of
    // O(M^2).  Multi-axis jump laws couple axes and take the generic path.
    bool factorizable = true;
    for (const auto& leaf : model.leaves())
        if (leaf.axis_end - leaf.axis_begin > 1 && leaf.exponent_kind != ExponentKind::Zero)
            factorizable = false;

    if (factorizable) {
        std::vector<std::vector<double>> kern1d(axes.size());
        std::vector<int> digits(axes.size(), 0);
        for (const auto& leaf : model.leaves()) {
            for (std::size_t a = leaf.axis_begin; a < leaf.axis_end; ++a) {
                const Axis& ax = axes[a];
                std::vector<std::complex<double>> damp(static_cast<std::size_t>(ax.m));
                for (int k = 0; k < ax.m; ++k) {
                    digits[a] = k;
                    const std::complex<double> psi =
                        leaf.exponent_kind == ExponentKind::Zero ? 0.0 : model.psi_leaf(leaf, digits);
                    damp[static_cast<std::size_t>(k)] = ax.w_xi * std::exp(-t * psi);
                }
                digits[a] = 0;
                std::vector<double> row(static_cast<std::size_t>(ax.m));
                for (int j = 0; j < ax.m; ++j) {
                    std::complex<double> acc = 0.0;
                    for (int k = 0; k < ax.m; ++k) {
                        const double theta = axis_angle(ax, j, k);
                        acc += damp[static_cast<std::size_t>(k)] *
                               std::complex<double>(std::cos(theta), std::sin(theta));
                    }
                    row[static_cast<std::size_t>(j)] = acc.real();
                }
                kern1d[a] = std::move(row);
            }
        }
        std::vector<int> dx(axes.size());
        for (std::size_t x = 0; x < M; ++x) {
            g.decompose(x, dx);
            double v = 1.0;
            for (std::size_t a = 0; a < axes.size(); ++a)
                v *= kern1d[a][static_cast<std::size_t>(dx[a])];
            p[x] = v;
        }
    } else {
        std::vector<std::complex<double>> damp(M);
        for (std::size_t k = 0; k < M; ++k)
            damp[k] = g.dual_weight() * std::exp(-t * model.psi(k));
        for (std::size_t x = 0; x < M; ++x) {
            std::complex<double> acc = 0.0;
            for (std::size_t k = 0; k < M; ++k) acc += damp[k] * g.pairing(x, k);
            p[x] = acc.real();
        }
    }

    double pmax = 0.0;
    for (double v : p) pmax = std::max(pmax, v);
    double pmin = 0.0;
    for (double v : p) pmin = std::min(pmin, v);
    if (pmin < -1e-10 * std::max(pmax, 1.0))
        throw NumericError(NumericError::Kind::GridTooCoarse,
                           "heat kernel positivity violated beyond rounding (min " +
                               std::to_string(pmin) + "); the grid is too coarse for this t");
    for (double& v : p)
        if (v < 0.0) v = 0.0;

    double mass = 0.0;
    for (double v : p) mass += v;
    mass *= g.haar_weight();
    if (std::abs(mass - 1.0) > 1e-9)
        throw NumericError(NumericError::Kind::GridTooCoarse,
                           "heat kernel mass " + std::to_string(mass) + " is not 1 within 1e-9");
    return p;
}

double pbar0(const LevyModel& model, double t) {
    require_positive_t(t, "pbar0");
    const auto& axes = model.group().axes();
    double prod = 1.0;
    std::vector<int> digits(axes.size(), 0);
    for (const auto& leaf : model.leaves()) {
        if (leaf.continuum) {
            prod *= cont_pbar0(leaf, t);
            continue;
        }
        // exact finite sum over this leaf's own dual block
        double sum = 0.0;
        std::vector<std::size_t> span;
        for (std::size_t a = leaf.axis_begin; a < leaf.axis_end; ++a) span.push_back(a);
        for (std::size_t a : span) digits[a] = 0;
        for (;;) {
            double w = 1.0;
            for (std::size_t a : span) w *= axes[a].w_xi;
            sum += w * std::exp(-2.0 * t * model.psi_leaf(leaf, digits).real());
            std::size_t pos = 0;
            for (; pos < span.size(); ++pos) {
                if (++digits[span[pos]] < axes[span[pos]].m) break;
                digits[span[pos]] = 0;
            }
            if (pos == span.size()) break;
        }
        prod *= sum;
    }
    return prod;
}

double pbar_integral(const LevyModel& model, double t) {
    require_positive_t(t, "pbar_integral");
    const double theta = total_divergence_weight(model);
    if (!(theta < 1.0))
        throw NumericError(NumericError::Kind::NonFinite,
                           "int_0^t pbar diverges: the small-time singularity is not integrable");

    const FinitePart fp = finite_part(model);
    const LevyModel::Leaf* cont = continuum_leaf(model);

    if (cont == nullptr) {
        // d/ds terms are exponentials; integrate each atom exactly.
        double sum = 0.0;
        for (std::size_t i = 0; i < fp.rate.size(); ++i) {
            const double a = fp.rate[i];
            sum += fp.weight[i] * (a == 0.0 ? t : -std::expm1(-a * t) / a);
        }
        return sum;
    }

    if (cont->exponent_kind == ExponentKind::Stable) {
        // Fast path: a pure stable factor beside rate-zero discrete mass.
        bool all_zero = std::all_of(fp.rate.begin(), fp.rate.end(), [](double a) { return a == 0.0; });
        if (all_zero) {
            double w0 = 0.0;
            for (double w : fp.weight) w0 += w;
            return w0 * stable_pbar_integral(cont->espec.alpha, t);
        }
    }

    // General case: quadrature of pbar0 with the substitution s = sigma^q that
    // flattens the s^{-theta} singularity at 0.
    const int q = static_cast<int>(std::ceil(2.0 / (1.0 - theta))) + 1;
    auto integrand = [&](double sigma) {
        if (sigma <= 0.0) return 0.0;
        const double s = std::pow(sigma, q);
        return q * std::pow(sigma, q - 1) * pbar0(model, s);
    };
    const double hi = std::pow(t, 1.0 / q);
    // coarse pass to set the absolute tolerance scale
    double coarse = 0.0;
    const int nc = 64;
    for (int i = 0; i <= nc; ++i) {
        const double x = hi * i / nc;
        const double w = (i == 0 || i == nc) ? 0.5 : 1.0;
        coarse += w * integrand(x);
    }
    coarse *= hi / nc;
    return quad::integrate(integrand, 0.0, hi, std::max(1e-300, 1e-11 * coarse));
}

double upsilon(const LevyModel& model, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw NumericError(NumericError::Kind::OutOfRange, "upsilon: beta must be positive");
    if (!dalang_ok(model))
        throw NumericError(NumericError::Kind::NonFinite,
                           "Dalang condition fails: Upsilon(beta) = +inf for this model");
    const FinitePart fp = finite_part(model);
    const LevyModel::Leaf* cont = continuum_leaf(model);
    double sum = 0.0;
    for (std::size_t i = 0; i < fp.rate.size(); ++i) {
        const double shifted = beta + fp.rate[i];
        sum += fp.weight[i] * (cont ? cont_upsilon(*cont, shifted) : 1.0 / shifted);
    }
    return sum;
}

double upsilon_truncated(const LevyModel& model, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw NumericError(NumericError::Kind::OutOfRange, "upsilon_truncated: beta must be positive");
    const Group& g = model.group();
    const auto& re = model.re_psi_grid();
    double sum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) sum += 1.0 / (beta + 2.0 * re[k]);
    return sum * g.dual_weight();
}

double upsilon_inverse(const LevyModel& model, double y) {
    if (!(y > 0.0) || !std::isfinite(y))
        throw NumericError(NumericError::Kind::OutOfRange, "upsilon_inverse: y must be positive");
    double lo = 1e-15, hi = 1e30;
    const double at_lo = upsilon(model, lo); // decreasing: largest value
    const double at_hi = upsilon(model, hi);
    if (y > at_lo)
        throw NumericError(NumericError::Kind::OutOfRange,
                           "upsilon_inverse: y exceeds Upsilon at the beta lower cap 1e-15");
    if (y < at_hi)
        throw NumericError(NumericError::Kind::OutOfRange,
                           "upsilon_inverse: y is below Upsilon at the beta upper cap 1e30");
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * lo; ++it) {
        const double mid = std::sqrt(lo * hi);
        (upsilon(model, mid) >= y ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

UpsilonProfile upsilon_profile(const LevyModel& model, double beta_min, double beta_max, int points) {
    if (!(beta_min > 0.0) || !(beta_max > beta_min) || points < 2)
        throw NumericError(NumericError::Kind::OutOfRange, "upsilon_profile: bad beta range");
    UpsilonProfile prof;
    prof.dalang_finite = dalang_ok(model);
    const double lr = std::log(beta_max / beta_min);
    for (int i = 0; i < points; ++i) {
        const double b = beta_min * std::exp(lr * i / (points - 1));
        prof.beta.push_back(b);
        if (prof.dalang_finite) prof.value.push_back(upsilon(model, b));
    }
    return prof;
}

TauberianReport tauberian_check(const LevyModel& model, double t) {
    require_positive_t(t, "tauberian_check");
    TauberianReport rep;
    rep.t = t;
    const double u = upsilon(model, 1.0 / t);
    rep.lower = u / std::numbers::e;
    rep.upper = u * std::numbers::e;
    rep.middle = pbar_integral(model, t);
    const double slack = 1e-12 * std::max(1.0, u);
    rep.ok = rep.lower <= rep.middle + slack && rep.middle <= rep.upper + slack;
    return rep;
}

ProjectionReport projection_compare(const LevyModel& product_model, std::span<const double> beta_grid) {
    const GroupSpec& spec = product_model.group().spec();
    if (spec.kind != GroupKind::Product || spec.factors.size() < 2)
        throw ConfigError("projection comparison needs a Product group with at least two factors");
    const ExponentSpec& espec = product_model.exponent();
    if (espec.kind != ExponentKind::ProductIndependent ||
        espec.components.size() != spec.factors.size())
        throw ConfigError("projection comparison needs a ProductIndependent exponent");
    for (std::size_t i = 1; i < spec.factors.size(); ++i)
        if (!is_compact(spec.factors[i]))
            throw ConfigError("projection comparison: every trailing factor must be compact");

    // First factor: the projected model, under its own default normalization.
    LevyModel proj(spec.factors[0], espec.components[0]);
    if (!dalang_ok(proj))
        throw NumericError(NumericError::Kind::NonFinite,
                           "projection comparison: Upsilon of the projected factor diverges");

    // Trailing compact factors: probability Haar (mass-one), counting dual.
    std::vector<LevyModel> kparts;
    for (std::size_t i = 1; i < spec.factors.size(); ++i) {
        const Normalization norm = is_discrete(spec.factors[i]) ? Normalization::CompactProbability
                                                                : Normalization::Default;
        kparts.emplace_back(spec.factors[i], espec.components[i], norm);
    }

    // Enumerate the (truncated) joint dual of the compact part: each character
    // eta contributes weight w_eta at spectral shift 2 Re Psi_K(eta), and
    //   Upsilon_full(beta) = sum_eta w_eta Upsilon_proj(beta + shift(eta)),
    // which dominates the eta = identity term Upsilon_proj(beta) termwise.
    std::vector<std::pair<double, double>> shifts; // (weight, shift)
    shifts.emplace_back(1.0, 0.0);
    for (const auto& part : kparts) {
        std::vector<std::pair<double, double>> next;
        const double w = part.group().dual_weight();
        for (const auto& [w0, s0] : shifts)
            for (std::size_t k = 0; k < part.group().size(); ++k)
                next.emplace_back(w0 * w, s0 + 2.0 * part.re_psi(k));
        shifts = std::move(next);
    }

    ProjectionReport rep;
    rep.ok = true;
    for (double beta : beta_grid) {
        const double up = upsilon(proj, beta);
        double full = 0.0;
        for (const auto& [w, s] : shifts) full += w * upsilon(proj, beta + s);
        rep.beta.push_back(beta);
        rep.upsilon_proj.push_back(up);
        rep.upsilon_full.push_back(full);
        if (!(up <= full * (1.0 + 1e-12))) rep.ok = false;
    }
    return rep;
}

SpectralAtoms spectral_atoms(const LevyModel& model) {
    std::vector<double> lw(model.group().size(), std::log(model.group().dual_weight()));
    return weighted_atoms(model, lw);
}

SpectralAtoms weighted_atoms(const LevyModel& model, std::span<const double> log_weights) {
    const auto& re = model.re_psi_grid();
    if (log_weights.size() != re.size())
        throw ConfigError("weighted_atoms: weight vector length mismatch");
    std::vector<std::size_t> order(re.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return re[a] < re[b]; });

    SpectralAtoms atoms;
    for (std::size_t idx : order) {
        if (log_weights[idx] == logdom::kNegInf) continue;
        const double a = 2.0 * re[idx];
        if (!atoms.rate.empty() && a - atoms.rate.back() <= 1e-12 * (1.0 + std::abs(a)))
            atoms.log_weight.back() = logdom::lse2(atoms.log_weight.back(), log_weights[idx]);
        else {
            atoms.rate.push_back(a);
            atoms.log_weight.push_back(log_weights[idx]);
        }
    }
    return atoms;
}

} // namespace she
