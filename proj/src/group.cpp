#include "she/group.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace she {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long long positive_mod(long long v, long long m) {
    long long r = v % m;
    return r < 0 ? r + m : r;
}

long long gcd_ll(long long a, long long b) { return std::gcd(a, b); }

// Modular inverse of a mod m (m >= 1, gcd(a,m) = 1), extended Euclid.
long long mod_inverse(long long a, long long m) {
    if (m == 1) return 0;
    long long t = 0, new_t = 1, r = m, new_r = positive_mod(a, m);
    while (new_r != 0) {
        const long long q = r / new_r;
        const long long tmp_t = t - q * new_t;
        t = new_t;
        new_t = tmp_t;
        const long long tmp_r = r - q * new_r;
        r = new_r;
        new_r = tmp_r;
    }
    if (r != 1) throw ConfigError("multiplier is not a unit modulo " + std::to_string(m));
    return positive_mod(t, m);
}

void validate_spec(const GroupSpec& g) {
    switch (g.kind) {
    case GroupKind::Trivial:
        return;
    case GroupKind::Cyclic:
        if (g.n < 1) throw ConfigError("Cyclic order must be >= 1");
        return;
    case GroupKind::Lattice:
        if (g.dim < 1) throw ConfigError("Lattice dimension must be >= 1");
        if (!(g.delta > 0.0)) throw ConfigError("Lattice spacing must be positive");
        if (g.radius < 1) throw ConfigError("Lattice truncation radius must be >= 1");
        return;
    case GroupKind::Torus:
        if (g.resolution < 1) throw ConfigError("Torus resolution must be >= 1");
        return;
    case GroupKind::RealLine:
        if (!(g.halfwidth > 0.0)) throw ConfigError("RealLine halfwidth must be positive");
        if (g.resolution < 2) throw ConfigError("RealLine resolution must be >= 2");
        return;
    case GroupKind::Product:
        if (g.factors.empty()) throw ConfigError("Product needs at least one factor");
        for (const auto& f : g.factors) validate_spec(f);
        return;
    }
    throw ConfigError("unknown group kind");
}

// Append the axes of one (non-product) factor.
void append_axes(const GroupSpec& g, Normalization norm, std::vector<Axis>& out) {
    switch (g.kind) {
    case GroupKind::Trivial:
        return; // zero axes; the one-point group
    case GroupKind::Cyclic: {
        Axis a;
        a.kind = AxisKind::Cyclic;
        a.m = g.n;
        a.x_step = 1.0;
        a.x_center = 0;
        a.xi_step = 1.0;
        a.xi_center = 0;
        if (norm == Normalization::CompactProbability) {
            a.w_x = 1.0 / g.n;
            a.w_xi = 1.0;
        } else {
            a.w_x = 1.0;
            a.w_xi = 1.0 / g.n;
        }
        a.primal_discrete = true;
        a.primal_compact = true;
        out.push_back(a);
        return;
    }
    case GroupKind::Lattice: {
        const int m = 2 * g.radius + 1;
        for (int d = 0; d < g.dim; ++d) {
            Axis a;
            a.kind = AxisKind::Lattice;
            a.m = m;
            a.x_step = g.delta;
            a.x_center = g.radius;
            a.w_x = 1.0; // counting measure on the lattice
            a.xi_step = kTwoPi / (m * g.delta);
            a.xi_center = m / 2;
            a.w_xi = 1.0 / m; // dual torus carries total mass 1
            a.primal_discrete = true;
            a.primal_compact = false;
            out.push_back(a);
        }
        return;
    }
    case GroupKind::Torus: {
        Axis a;
        a.kind = AxisKind::Torus;
        a.m = g.resolution;
        a.x_step = 1.0 / g.resolution; // unit-circumference circle
        a.x_center = 0;
        a.w_x = 1.0 / g.resolution; // probability Haar
        a.xi_step = 1.0;            // integer frequencies
        a.xi_center = g.resolution / 2;
        a.w_xi = 1.0; // counting on the dual lattice
        a.primal_discrete = false;
        a.primal_compact = true;
        out.push_back(a);
        return;
    }
    case GroupKind::RealLine: {
        Axis a;
        a.kind = AxisKind::RealLine;
        a.m = g.resolution;
        a.x_step = 2.0 * g.halfwidth / g.resolution;
        a.x_center = g.resolution / 2;
        a.w_x = a.x_step; // Lebesgue (a = 1)
        a.xi_step = kTwoPi / (g.resolution * a.x_step);
        a.xi_center = g.resolution / 2;
        a.w_xi = a.xi_step / kTwoPi; // b = 1/(2*pi)
        a.primal_discrete = false;
        a.primal_compact = false;
        out.push_back(a);
        return;
    }
    case GroupKind::Product:
        for (const auto& f : g.factors) append_axes(f, norm, out);
        return;
    }
}

std::size_t count_axes(const GroupSpec& g) {
    switch (g.kind) {
    case GroupKind::Trivial: return 0;
    case GroupKind::Cyclic:
    case GroupKind::Torus:
    case GroupKind::RealLine: return 1;
    case GroupKind::Lattice: return static_cast<std::size_t>(g.dim);
    case GroupKind::Product: {
        std::size_t n = 0;
        for (const auto& f : g.factors) n += count_axes(f);
        return n;
    }
    }
    return 0;
}

} // namespace

GroupSpec GroupSpec::trivial() { return GroupSpec{}; }

GroupSpec GroupSpec::cyclic(int n) {
    GroupSpec g;
    g.kind = GroupKind::Cyclic;
    g.n = n;
    return g;
}

GroupSpec GroupSpec::lattice(int dim, double delta, int radius) {
    GroupSpec g;
    g.kind = GroupKind::Lattice;
    g.dim = dim;
    g.delta = delta;
    g.radius = radius;
    return g;
}

GroupSpec GroupSpec::torus(int resolution) {
    GroupSpec g;
    g.kind = GroupKind::Torus;
    g.resolution = resolution;
    return g;
}

GroupSpec GroupSpec::real_line(double halfwidth, int resolution) {
    GroupSpec g;
    g.kind = GroupKind::RealLine;
    g.halfwidth = halfwidth;
    g.resolution = resolution;
    return g;
}

GroupSpec GroupSpec::product(std::vector<GroupSpec> factors) {
    GroupSpec g;
    g.kind = GroupKind::Product;
    g.factors = std::move(factors);
    return g;
}

bool is_discrete(const GroupSpec& g) {
    switch (g.kind) {
    case GroupKind::Trivial:
    case GroupKind::Cyclic:
    case GroupKind::Lattice: return true;
    case GroupKind::Torus:
    case GroupKind::RealLine: return false;
    case GroupKind::Product:
        return std::all_of(g.factors.begin(), g.factors.end(),
                           [](const GroupSpec& f) { return is_discrete(f); });
    }
    return false;
}

bool is_compact(const GroupSpec& g) {
    switch (g.kind) {
    case GroupKind::Trivial:
    case GroupKind::Cyclic:
    case GroupKind::Torus: return true;
    case GroupKind::Lattice:
    case GroupKind::RealLine: return false;
    case GroupKind::Product:
        return std::all_of(g.factors.begin(), g.factors.end(),
                           [](const GroupSpec& f) { return is_compact(f); });
    }
    return false;
}

bool is_finite(const GroupSpec& g) { return is_discrete(g) && is_compact(g); }

Group::Group(GroupSpec spec, Normalization norm) : spec_(std::move(spec)) {
    validate_spec(spec_);
    discrete_ = is_discrete(spec_);
    compact_ = is_compact(spec_);
    if (norm == Normalization::CompactProbability && !compact_)
        throw ConfigError("probability Haar normalization requires a compact group");

    append_axes(spec_, norm, axes_);

    factor_offsets_.push_back(0);
    if (spec_.kind == GroupKind::Product) {
        std::size_t off = 0;
        for (const auto& f : spec_.factors) {
            off += count_axes(f);
            factor_offsets_.push_back(off);
        }
    } else {
        factor_offsets_.push_back(axes_.size());
    }

    size_ = 1;
    w_x_ = 1.0;
    w_xi_ = 1.0;
    for (const auto& a : axes_) {
        size_ *= static_cast<std::size_t>(a.m);
        w_x_ *= a.w_x;
        w_xi_ *= a.w_xi;
    }

    // identity indices: centered digit 0 on each axis
    std::size_t id = 0, did = 0;
    for (const auto& a : axes_) {
        id = id * a.m + static_cast<std::size_t>(a.x_center);
        did = did * a.m + static_cast<std::size_t>(a.xi_center);
    }
    identity_ = id;
    dual_identity_ = did;
}

void Group::decompose(std::size_t flat, std::span<int> digits) const {
    for (std::size_t i = axes_.size(); i-- > 0;) {
        digits[i] = static_cast<int>(flat % axes_[i].m);
        flat /= axes_[i].m;
    }
}

std::size_t Group::compose(std::span<const int> digits) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < axes_.size(); ++i)
        flat = flat * axes_[i].m + static_cast<std::size_t>(digits[i]);
    return flat;
}

std::vector<double> Group::coords(std::size_t site) const {
    std::vector<int> d(axes_.size());
    decompose(site, d);
    std::vector<double> out(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i)
        out[i] = (d[i] - axes_[i].x_center) * axes_[i].x_step;
    return out;
}

std::vector<double> Group::dual_coords(std::size_t k) const {
    std::vector<int> d(axes_.size());
    decompose(k, d);
    std::vector<double> out(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i)
        out[i] = (d[i] - axes_[i].xi_center) * axes_[i].xi_step;
    return out;
}

std::size_t Group::add(std::size_t a, std::size_t b) const {
    std::vector<int> da(axes_.size()), db(axes_.size());
    decompose(a, da);
    decompose(b, db);
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        const long long m = axes_[i].m, c = axes_[i].x_center;
        da[i] = static_cast<int>(positive_mod(da[i] + db[i] - c, m));
    }
    return compose(da);
}

std::size_t Group::neg(std::size_t a) const {
    std::vector<int> d(axes_.size());
    decompose(a, d);
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        const long long m = axes_[i].m, c = axes_[i].x_center;
        d[i] = static_cast<int>(positive_mod(2 * c - d[i], m));
    }
    return compose(d);
}

double axis_angle(const Axis& ax, int x_digit, int k_digit) {
    const long long r = positive_mod(
        static_cast<long long>(x_digit - ax.x_center) * (k_digit - ax.xi_center), ax.m);
    return kTwoPi * static_cast<double>(r) / static_cast<double>(ax.m);
}

std::complex<double> Group::pairing(std::size_t site, std::size_t k) const {
    if (site >= size_ || k >= size_)
        throw ConfigError("pairing index out of range");
    std::vector<int> dx(axes_.size()), dk(axes_.size());
    decompose(site, dx);
    decompose(k, dk);
    double angle = 0.0;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        const long long m = axes_[i].m;
        const long long r = positive_mod(
            static_cast<long long>(dx[i] - axes_[i].x_center) * (dk[i] - axes_[i].xi_center), m);
        angle += static_cast<double>(r) / static_cast<double>(m);
    }
    angle *= kTwoPi;
    return {std::cos(angle), std::sin(angle)};
}

std::vector<std::complex<double>> Group::fourier(std::span<const double> f) const {
    std::vector<std::complex<double>> fc(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) fc[i] = f[i];
    return fourier(std::span<const std::complex<double>>(fc));
}

std::vector<std::complex<double>> Group::fourier(std::span<const std::complex<double>> f) const {
    if (f.size() != size_) throw ConfigError("fourier: vector length mismatch");
    std::vector<std::complex<double>> out(size_);
    for (std::size_t k = 0; k < size_; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t x = 0; x < size_; ++x)
            acc += f[x] * std::conj(pairing(x, k));
        out[k] = acc * w_x_;
    }
    return out;
}

std::vector<std::complex<double>> Group::inverse_fourier(std::span<const std::complex<double>> fh) const {
    if (fh.size() != size_) throw ConfigError("inverse_fourier: vector length mismatch");
    std::vector<std::complex<double>> out(size_);
    for (std::size_t x = 0; x < size_; ++x) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < size_; ++k)
            acc += fh[k] * pairing(x, k);
        out[x] = acc * w_xi_;
    }
    return out;
}

double Group::norm_sq(std::span<const double> f) const {
    double s = 0.0;
    for (double v : f) s += v * v;
    return s * w_x_;
}

double Group::dual_norm_sq(std::span<const std::complex<double>> fh) const {
    double s = 0.0;
    for (const auto& v : fh) s += std::norm(v);
    return s * w_xi_;
}

namespace {

Axis flip_axis(const Axis& a) {
    Axis d;
    switch (a.kind) {
    case AxisKind::Cyclic: d.kind = AxisKind::Cyclic; break;
    case AxisKind::Lattice: d.kind = AxisKind::Torus; break;
    case AxisKind::Torus: d.kind = AxisKind::Lattice; break;
    case AxisKind::RealLine: d.kind = AxisKind::RealLine; break;
    }
    d.m = a.m;
    d.x_step = a.xi_step;
    d.x_center = a.xi_center;
    d.w_x = a.w_xi;
    d.xi_step = a.x_step;
    d.xi_center = a.x_center;
    d.w_xi = a.w_x;
    d.primal_discrete = a.primal_compact;
    d.primal_compact = a.primal_discrete;
    return d;
}

// Structural kind of the dual of one factor.  Axis metadata stays exact; the
// kind tag for Lattice<->Torus flips records the grid size, not the geometric
// circumference (which lives in the axis steps).
GroupSpec dual_factor_structure(const GroupSpec& g) {
    switch (g.kind) {
    case GroupKind::Trivial: return GroupSpec::trivial();
    case GroupKind::Cyclic: return GroupSpec::cyclic(g.n);
    case GroupKind::Lattice: {
        const int m = 2 * g.radius + 1;
        if (g.dim == 1) return GroupSpec::torus(m);
        std::vector<GroupSpec> fs(static_cast<std::size_t>(g.dim), GroupSpec::torus(m));
        return GroupSpec::product(std::move(fs));
    }
    case GroupKind::Torus: return GroupSpec::lattice(1, 1.0, std::max(1, g.resolution / 2));
    case GroupKind::RealLine: {
        Group one(g);
        const Axis& a = one.axes().front();
        return GroupSpec::real_line(0.5 * a.m * a.xi_step, a.m); // = pi/dx
    }
    case GroupKind::Product: {
        std::vector<GroupSpec> fs;
        fs.reserve(g.factors.size());
        for (const auto& f : g.factors) fs.push_back(dual_factor_structure(f));
        return GroupSpec::product(std::move(fs));
    }
    }
    return GroupSpec::trivial();
}

} // namespace

DualSpec dual(const GroupSpec& g) {
    Group grp(g);
    DualSpec d;
    d.structure = dual_factor_structure(g);
    d.axes.reserve(grp.axes().size());
    for (const auto& a : grp.axes()) d.axes.push_back(flip_axis(a));
    d.discrete = is_compact(g);
    d.compact = is_discrete(g);
    return d;
}

GroupSpec bidual(const GroupSpec& g) {
    // flip twice at the axis level, then rebuild parameters from the axes
    Group grp(g);
    std::vector<Axis> twice;
    twice.reserve(grp.axes().size());
    for (const auto& a : grp.axes()) twice.push_back(flip_axis(flip_axis(a)));

    std::size_t cursor = 0;
    // rebuild each factor of the original shape from its (doubly flipped) axes
    auto rebuild = [&](const GroupSpec& shape, auto&& self) -> GroupSpec {
        switch (shape.kind) {
        case GroupKind::Trivial: return GroupSpec::trivial();
        case GroupKind::Cyclic: {
            const Axis& a = twice[cursor++];
            return GroupSpec::cyclic(a.m);
        }
        case GroupKind::Lattice: {
            const Axis& a = twice[cursor];
            cursor += static_cast<std::size_t>(shape.dim);
            return GroupSpec::lattice(shape.dim, a.x_step, (a.m - 1) / 2);
        }
        case GroupKind::Torus: {
            const Axis& a = twice[cursor++];
            return GroupSpec::torus(a.m);
        }
        case GroupKind::RealLine: {
            const Axis& a = twice[cursor++];
            return GroupSpec::real_line(0.5 * a.m * a.x_step, a.m);
        }
        case GroupKind::Product: {
            std::vector<GroupSpec> fs;
            fs.reserve(shape.factors.size());
            for (const auto& f : shape.factors) fs.push_back(self(f, self));
            return GroupSpec::product(std::move(fs));
        }
        }
        return GroupSpec::trivial();
    };
    return rebuild(g, rebuild);
}

bool structurally_equal(const GroupSpec& a, const GroupSpec& b, double tol) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case GroupKind::Trivial: return true;
    case GroupKind::Cyclic: return a.n == b.n;
    case GroupKind::Lattice:
        return a.dim == b.dim && a.radius == b.radius && std::fabs(a.delta - b.delta) <= tol;
    case GroupKind::Torus: return a.resolution == b.resolution;
    case GroupKind::RealLine:
        return a.resolution == b.resolution && std::fabs(a.halfwidth - b.halfwidth) <= tol;
    case GroupKind::Product:
        if (a.factors.size() != b.factors.size()) return false;
        for (std::size_t i = 0; i < a.factors.size(); ++i)
            if (!structurally_equal(a.factors[i], b.factors[i], tol)) return false;
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Isomorphisms

namespace {

std::size_t axis_count_of(const GroupSpec& g) { return count_axes(g); }

void require_same_axis_layout(const Isomorphism& h) {
    const std::size_t n = axis_count_of(h.source);
    if (h.multiplier.size() != n || h.scale.size() != n)
        throw ConfigError("isomorphism descriptor does not match the source group");
}

} // namespace

Isomorphism identity_isomorphism(const GroupSpec& g) {
    Isomorphism h;
    h.source = g;
    h.target = g;
    const std::size_t nf = (g.kind == GroupKind::Product) ? g.factors.size() : 1;
    h.factor_perm.resize(nf);
    for (std::size_t i = 0; i < nf; ++i) h.factor_perm[i] = static_cast<int>(i);
    h.multiplier.assign(axis_count_of(g), 1);
    h.scale.assign(axis_count_of(g), 1.0);
    h.modulus = 1.0;
    return h;
}

Isomorphism make_multiplier_automorphism(const GroupSpec& g, long long a) {
    Group grp(g);
    Isomorphism h = identity_isomorphism(g);
    for (const auto& ax : grp.axes()) {
        if (ax.kind == AxisKind::RealLine)
            throw ConfigError("integer multiplier automorphism is not defined on RealLine axes; "
                              "use make_real_scaling");
        if (gcd_ll(positive_mod(a, ax.m), ax.m) != 1)
            throw ConfigError("multiplier " + std::to_string(a) + " is not a unit modulo " +
                              std::to_string(ax.m));
    }
    for (auto& mlt : h.multiplier) mlt = a;
    h.modulus = 1.0; // discrete and/or compact groups are unimodular
    return h;
}

Isomorphism make_real_scaling(const GroupSpec& g, double c) {
    if (c == 0.0 || !std::isfinite(c)) throw ConfigError("scaling constant must be finite, nonzero");
    Group grp(g);
    Isomorphism h = identity_isomorphism(g);
    double mu = 1.0;
    // target: RealLine windows scale by |c|
    auto rescale = [&](const GroupSpec& s, auto&& self) -> GroupSpec {
        GroupSpec t = s;
        if (s.kind == GroupKind::RealLine) {
            t.halfwidth = s.halfwidth * std::fabs(c);
        } else if (s.kind == GroupKind::Product) {
            for (auto& f : t.factors) f = self(f, self);
        }
        return t;
    };
    h.target = rescale(g, rescale);
    for (std::size_t i = 0; i < grp.axes().size(); ++i) {
        if (grp.axes()[i].kind == AxisKind::RealLine) {
            h.scale[i] = c;
            mu *= std::fabs(c);
        }
    }
    h.modulus = mu;
    return h;
}

Isomorphism make_factor_permutation(const GroupSpec& g, std::vector<int> perm) {
    if (g.kind != GroupKind::Product)
        throw ConfigError("factor permutation requires a Product group");
    const std::size_t nf = g.factors.size();
    if (perm.size() != nf) throw ConfigError("permutation length mismatch");
    std::vector<bool> seen(nf, false);
    for (int p : perm) {
        if (p < 0 || static_cast<std::size_t>(p) >= nf || seen[static_cast<std::size_t>(p)])
            throw ConfigError("not a permutation");
        seen[static_cast<std::size_t>(p)] = true;
    }
    Isomorphism h = identity_isomorphism(g);
    h.factor_perm.assign(perm.begin(), perm.end());
    std::vector<GroupSpec> tf(nf);
    for (std::size_t i = 0; i < nf; ++i) tf[static_cast<std::size_t>(perm[i])] = g.factors[i];
    h.target = GroupSpec::product(std::move(tf));
    h.modulus = 1.0;
    return h;
}

namespace {

// axis index offsets per factor of a spec
std::vector<std::size_t> factor_axis_offsets(const GroupSpec& g) {
    std::vector<std::size_t> off{0};
    if (g.kind == GroupKind::Product) {
        std::size_t c = 0;
        for (const auto& f : g.factors) {
            c += count_axes(f);
            off.push_back(c);
        }
    } else {
        off.push_back(count_axes(g));
    }
    return off;
}

// axis-level permutation induced by the factor permutation
std::vector<std::size_t> axis_perm_of(const Isomorphism& h) {
    const auto src_off = factor_axis_offsets(h.source);
    const auto tgt_off = factor_axis_offsets(h.target);
    const std::size_t n = src_off.back();
    std::vector<std::size_t> perm(n);
    for (std::size_t f = 0; f + 1 < src_off.size(); ++f) {
        const std::size_t tf = static_cast<std::size_t>(h.factor_perm[f]);
        for (std::size_t i = src_off[f]; i < src_off[f + 1]; ++i)
            perm[i] = tgt_off[tf] + (i - src_off[f]);
    }
    return perm;
}

} // namespace

Isomorphism compose(const Isomorphism& f, const Isomorphism& g) {
    if (!structurally_equal(g.target, f.source))
        throw ConfigError("isomorphism composition: inner target != outer source");
    require_same_axis_layout(f);
    require_same_axis_layout(g);
    Isomorphism h;
    h.source = g.source;
    h.target = f.target;
    const auto gperm = axis_perm_of(g);
    h.factor_perm.resize(g.factor_perm.size());
    for (std::size_t i = 0; i < g.factor_perm.size(); ++i)
        h.factor_perm[i] = f.factor_perm[static_cast<std::size_t>(g.factor_perm[i])];
    const std::size_t n = g.multiplier.size();
    h.multiplier.resize(n);
    h.scale.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        h.multiplier[i] = g.multiplier[i] * f.multiplier[gperm[i]];
        h.scale[i] = g.scale[i] * f.scale[gperm[i]];
    }
    h.modulus = f.modulus * g.modulus;
    return h;
}

Isomorphism inverse(const Isomorphism& h) {
    require_same_axis_layout(h);
    Isomorphism inv;
    inv.source = h.target;
    inv.target = h.source;
    inv.factor_perm.resize(h.factor_perm.size());
    for (std::size_t i = 0; i < h.factor_perm.size(); ++i)
        inv.factor_perm[static_cast<std::size_t>(h.factor_perm[i])] = static_cast<int>(i);
    const auto perm = axis_perm_of(h);
    Group src(h.source);
    const std::size_t n = h.multiplier.size();
    inv.multiplier.assign(n, 1);
    inv.scale.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Axis& ax = src.axes()[i];
        if (ax.kind == AxisKind::RealLine) {
            inv.scale[perm[i]] = 1.0 / h.scale[i];
        } else {
            inv.multiplier[perm[i]] = mod_inverse(h.multiplier[i], ax.m);
        }
    }
    inv.modulus = 1.0 / h.modulus;
    return inv;
}

double modulus(const Isomorphism& h) { return h.modulus; }

std::size_t apply(const Isomorphism& h, const Group& source, std::size_t site) {
    require_same_axis_layout(h);
    if (!structurally_equal(h.source, source.spec()))
        throw ConfigError("isomorphism source does not match the group");
    Group target(h.target);
    const auto perm = axis_perm_of(h);
    std::vector<int> ds(source.axes().size()), dt(target.axes().size());
    source.decompose(site, ds);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Axis& sa = source.axes()[i];
        const Axis& ta = target.axes()[perm[i]];
        const long long centered = ds[i] - sa.x_center;
        long long image;
        if (sa.kind == AxisKind::RealLine) {
            // grid-exact scaling: labels scale by c, steps scale by |c|
            const double sgn = h.scale[i] < 0 ? -1.0 : 1.0;
            image = static_cast<long long>(sgn) * centered;
        } else {
            image = h.multiplier[i] * centered;
        }
        dt[perm[i]] = static_cast<int>(positive_mod(image + ta.x_center, ta.m));
    }
    return target.compose(dt);
}

} // namespace she
