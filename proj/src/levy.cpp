#include "she/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "she/errors.hpp"

namespace she {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t axis_count_of(const GroupSpec& g) {
    switch (g.kind) {
    case GroupKind::Trivial: return 0;
    case GroupKind::Cyclic:
    case GroupKind::Torus:
    case GroupKind::RealLine: return 1;
    case GroupKind::Lattice: return static_cast<std::size_t>(g.dim);
    case GroupKind::Product: {
        std::size_t n = 0;
        for (const auto& f : g.factors) n += axis_count_of(f);
        return n;
    }
    }
    return 0;
}

void validate_leaf(const GroupSpec& g, const ExponentSpec& e) {
    auto fail = [&](const std::string& msg) { throw ConfigError("exponent/group mismatch: " + msg); };
    switch (e.kind) {
    case ExponentKind::Zero:
        return; // constant process is valid on any factor
    case ExponentKind::CyclicRates: {
        if (g.kind != GroupKind::Cyclic) fail("CyclicRates requires a Cyclic factor");
        const auto need = static_cast<std::size_t>(g.n - 1);
        if (e.rates.size() != need) {
            std::ostringstream os;
            os << "CyclicRates on Cyclic(" << g.n << ") needs " << need
               << " rates, got " << e.rates.size();
            fail(os.str());
        }
        for (double r : e.rates)
            if (!(r >= 0.0) || !std::isfinite(r)) fail("CyclicRates rates must be finite and >= 0");
        return;
    }
    case ExponentKind::LatticeWalk: {
        if (g.kind != GroupKind::Lattice) fail("LatticeWalk requires a Lattice factor");
        if (!(e.rate > 0.0) || !std::isfinite(e.rate)) fail("LatticeWalk rate must be positive");
        if (e.jumps.empty()) fail("LatticeWalk needs a nonempty jump law");
        double total = 0.0;
        for (const auto& j : e.jumps) {
            if (j.offset.size() != static_cast<std::size_t>(g.dim))
                fail("LatticeWalk jump offset dimension mismatch");
            if (!(j.prob > 0.0)) fail("LatticeWalk jump probabilities must be positive");
            bool zero = std::all_of(j.offset.begin(), j.offset.end(), [](int v) { return v == 0; });
            if (zero) fail("LatticeWalk jump law must not charge the origin");
            total += j.prob;
        }
        if (std::abs(total - 1.0) > 1e-9) fail("LatticeWalk jump probabilities must sum to 1");
        return;
    }
    case ExponentKind::Stable:
        if (g.kind != GroupKind::RealLine) fail("Stable requires a RealLine factor");
        if (!(e.alpha > 0.0) || !(e.alpha <= 2.0)) fail("Stable index alpha must lie in (0,2]");
        return;
    case ExponentKind::TorusBrownian:
        if (g.kind != GroupKind::Torus) fail("TorusBrownian requires a Torus factor");
        if (!(e.rate > 0.0) || !std::isfinite(e.rate)) fail("TorusBrownian kappa must be positive");
        return;
    case ExponentKind::ProductIndependent:
        fail("ProductIndependent component paired with a non-product factor");
    }
}

} // namespace

ExponentSpec ExponentSpec::zero() { return {}; }

ExponentSpec ExponentSpec::cyclic_rates(std::vector<double> rates) {
    ExponentSpec e;
    e.kind = ExponentKind::CyclicRates;
    e.rates = std::move(rates);
    return e;
}

ExponentSpec ExponentSpec::lattice_walk(double kappa, std::vector<LatticeJump> jumps) {
    ExponentSpec e;
    e.kind = ExponentKind::LatticeWalk;
    e.rate = kappa;
    e.jumps = std::move(jumps);
    return e;
}

ExponentSpec ExponentSpec::stable(double alpha) {
    ExponentSpec e;
    e.kind = ExponentKind::Stable;
    e.alpha = alpha;
    return e;
}

ExponentSpec ExponentSpec::torus_brownian(double kappa) {
    ExponentSpec e;
    e.kind = ExponentKind::TorusBrownian;
    e.rate = kappa;
    return e;
}

ExponentSpec ExponentSpec::product(std::vector<ExponentSpec> components) {
    ExponentSpec e;
    e.kind = ExponentKind::ProductIndependent;
    e.components = std::move(components);
    return e;
}

LevyModel::LevyModel(GroupSpec group, ExponentSpec exponent, Normalization norm)
    : group_(std::move(group), norm), exponent_(std::move(exponent)), norm_(norm) {
    // Pair up group factors with exponent components, flattening nested products.
    std::size_t cursor = 0;
    auto build = [&](auto&& self, const GroupSpec& g, const ExponentSpec& e) -> void {
        if (g.kind == GroupKind::Product && e.kind == ExponentKind::ProductIndependent) {
            if (e.components.size() != g.factors.size())
                throw ConfigError("ProductIndependent component count does not match group factors");
            for (std::size_t i = 0; i < g.factors.size(); ++i)
                self(self, g.factors[i], e.components[i]);
            return;
        }
        if (g.kind == GroupKind::Product && e.kind != ExponentKind::Zero)
            throw ConfigError("a Product group needs a ProductIndependent exponent (or Zero)");
        validate_leaf(g, e);
        Leaf leaf;
        leaf.group_kind = g.kind;
        leaf.exponent_kind = e.kind;
        leaf.gspec = g;
        leaf.espec = e;
        leaf.axis_begin = cursor;
        leaf.axis_end = cursor + axis_count_of(g);
        leaf.continuum = !is_discrete(g);
        cursor = leaf.axis_end;
        leaves_.push_back(leaf);
    };
    build(build, group_.spec(), exponent_);

    for (const auto& leaf : leaves_) {
        if (leaf.continuum) ++continuum_leaves_;
        switch (leaf.exponent_kind) {
        case ExponentKind::CyclicRates:
            total_jump_rate_ += std::accumulate(leaf.espec.rates.begin(), leaf.espec.rates.end(), 0.0);
            break;
        case ExponentKind::LatticeWalk:
            total_jump_rate_ += leaf.espec.rate;
            break;
        default:
            break;
        }
    }

    re_psi_.resize(group_.size());
    std::vector<int> digits(group_.axes().size());
    for (std::size_t chi = 0; chi < group_.size(); ++chi) {
        group_.decompose(chi, digits);
        double re = 0.0;
        for (const auto& leaf : leaves_)
            re += psi_leaf(leaf, digits).real();
        re_psi_[chi] = re;
        max_re_psi_ = std::max(max_re_psi_, re);
    }
}

std::complex<double> LevyModel::psi(std::size_t chi) const {
    std::vector<int> digits(group_.axes().size());
    group_.decompose(chi, digits);
    std::complex<double> total = 0.0;
    for (const auto& leaf : leaves_)
        total += psi_leaf(leaf, digits);
    return total;
}

std::complex<double> LevyModel::psi_leaf(const Leaf& leaf, std::span<const int> digits) const {
    const auto& axes = group_.axes();
    switch (leaf.exponent_kind) {
    case ExponentKind::Zero:
        return 0.0;
    case ExponentKind::CyclicRates: {
        const Axis& ax = axes[leaf.axis_begin];
        const int n = ax.m;
        const int k = digits[leaf.axis_begin];
        std::complex<double> sum = 0.0;
        for (int j = 1; j < n; ++j) {
            const double theta = kTwoPi * static_cast<double>(static_cast<long long>(j) * k % n) / n;
            sum += leaf.espec.rates[static_cast<std::size_t>(j - 1)] *
                   (1.0 - std::complex<double>(std::cos(theta), std::sin(theta)));
        }
        return sum;
    }
    case ExponentKind::LatticeWalk: {
        const double delta = leaf.gspec.delta;
        std::complex<double> sum = 0.0;
        for (const auto& jump : leaf.espec.jumps) {
            double phase = 0.0;
            for (std::size_t d = leaf.axis_begin; d < leaf.axis_end; ++d) {
                const Axis& ax = axes[d];
                const double xi = (digits[d] - ax.xi_center) * ax.xi_step;
                phase += jump.offset[d - leaf.axis_begin] * delta * xi;
            }
            sum += jump.prob * (1.0 - std::complex<double>(std::cos(phase), std::sin(phase)));
        }
        return leaf.espec.rate * sum;
    }
    case ExponentKind::Stable: {
        const Axis& ax = axes[leaf.axis_begin];
        const double xi = (digits[leaf.axis_begin] - ax.xi_center) * ax.xi_step;
        return std::pow(std::abs(xi), leaf.espec.alpha);
    }
    case ExponentKind::TorusBrownian: {
        const Axis& ax = axes[leaf.axis_begin];
        const double freq = kTwoPi * (digits[leaf.axis_begin] - ax.xi_center) * ax.xi_step;
        return leaf.espec.rate * freq * freq;
    }
    case ExponentKind::ProductIndependent:
        break; // flattened away in the constructor
    }
    throw NumericError(NumericError::Kind::OutOfRange, "unreachable exponent kind");
}

} // namespace she
