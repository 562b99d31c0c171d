#pragma once

// LCA group descriptors, Haar weights, dual groups, character pairings, and
// topological isomorphisms with moduli.
//
// Every supported group compiles to a list of cyclic-structured "axes": an axis
// has m points with spatial labels, a per-point Haar weight, m dual frequency
// labels, and a per-point dual (Plancherel) weight.  The character pairing on an
// axis is exp(2*pi*i * j*k / m) in (centered) integer indices, so the transform
// pair is a plain DFT and the Plancherel identity holds at rounding level:
// w_x * w_xi * m == 1 on every axis by construction.
//
// Normalization (standard choices):
//   discrete kinds  -> counting measure on points (w_x = 1), dual mass 1;
//   compact kinds   -> total mass 1 (w_x = 1/m), counting on the dual;
//   RealLine        -> w_x = dx (Lebesgue), dual weight dxi/(2*pi).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "she/errors.hpp"

namespace she {

enum class GroupKind { Trivial, Cyclic, Lattice, Torus, RealLine, Product };

struct GroupSpec {
    GroupKind kind = GroupKind::Trivial;

    int n = 1;                // Cyclic: order
    int dim = 1;              // Lattice: dimension
    double delta = 1.0;       // Lattice: spacing
    int radius = 1;           // Lattice: symmetric truncation (2*radius+1 points per dim)
    int resolution = 1;       // Torus / RealLine: grid size
    double halfwidth = 1.0;   // RealLine: window [-W, W)
    std::vector<GroupSpec> factors; // Product

    static GroupSpec trivial();
    static GroupSpec cyclic(int n);
    static GroupSpec lattice(int dim, double delta, int radius);
    static GroupSpec torus(int resolution);
    static GroupSpec real_line(double halfwidth, int resolution);
    static GroupSpec product(std::vector<GroupSpec> factors);
};

// Topology predicates (total and consistent under Product).
bool is_discrete(const GroupSpec& g);
bool is_compact(const GroupSpec& g);
bool is_finite(const GroupSpec& g); // discrete and compact, or truncated by numerics

enum class AxisKind { Cyclic, Lattice, Torus, RealLine };

// One cyclic-structured coordinate of the compiled group.
struct Axis {
    AxisKind kind;
    int m;               // number of points = number of dual points
    double x_step;       // spatial label spacing
    int x_center;        // labels are (index - x_center) * x_step
    double w_x;          // Haar weight per spatial point
    double xi_step;      // dual label spacing
    int xi_center;       // dual labels are (index - xi_center) * xi_step
    double w_xi;         // Plancherel weight per dual point
    bool primal_discrete;
    bool primal_compact;
};

// Phase angle (radians) contributed by one axis to the character pairing,
// computed with exact integer arithmetic mod m.
double axis_angle(const Axis& ax, int x_digit, int k_digit);

// Finite groups are simultaneously discrete and compact; the default convention
// is counting measure on the primal.  A few operations (the projection
// inequality, the compact-group linear-excitation bounds) follow proofs that
// need probability Haar on the compact side instead.
enum class Normalization { Default, CompactProbability };

// Compiled group: validated spec, flattened axes, index arithmetic, transforms.
class Group {
public:
    explicit Group(GroupSpec spec, Normalization norm = Normalization::Default);

    const GroupSpec& spec() const { return spec_; }
    const std::vector<Axis>& axes() const { return axes_; }
    // Axis range [factor_begin_[i], factor_begin_[i+1]) belongs to spec factor i
    // (the whole spec counts as one factor when it is not a Product).
    const std::vector<std::size_t>& factor_offsets() const { return factor_offsets_; }
    std::size_t factor_count() const { return factor_offsets_.size() - 1; }

    std::size_t size() const { return size_; } // number of sample points (1 for Trivial)
    bool discrete() const { return discrete_; }
    bool compact() const { return compact_; }
    bool finite() const { return discrete_ && compact_; }

    double haar_weight() const { return w_x_; }     // uniform across sites
    double dual_weight() const { return w_xi_; }    // uniform across dual points
    double total_mass() const { return w_x_ * static_cast<double>(size_); }

    std::vector<double> coords(std::size_t site) const;
    std::vector<double> dual_coords(std::size_t k) const;

    std::size_t identity() const { return identity_; }
    std::size_t dual_identity() const { return dual_identity_; }
    std::size_t add(std::size_t a, std::size_t b) const;
    std::size_t neg(std::size_t a) const;

    // Character pairing (x_site, chi_k); exact integer phase arithmetic.
    std::complex<double> pairing(std::size_t site, std::size_t k) const;

    // f_hat(chi) = sum_x f(x) conj((x,chi)) w_x      (direct transform)
    std::vector<std::complex<double>> fourier(std::span<const double> f) const;
    std::vector<std::complex<double>> fourier(std::span<const std::complex<double>> f) const;
    // f(x) = sum_chi f_hat(chi) (x,chi) w_xi          (inversion)
    std::vector<std::complex<double>> inverse_fourier(std::span<const std::complex<double>> fh) const;

    double norm_sq(std::span<const double> f) const;                 // sum |f|^2 w_x
    double dual_norm_sq(std::span<const std::complex<double>> fh) const; // sum |fh|^2 w_xi

    // Per-axis index decomposition helpers (row-major flattening).
    void decompose(std::size_t flat, std::span<int> digits) const;
    std::size_t compose(std::span<const int> digits) const;

private:
    GroupSpec spec_;
    std::vector<Axis> axes_;
    std::vector<std::size_t> factor_offsets_;
    std::size_t size_ = 1;
    double w_x_ = 1.0;
    double w_xi_ = 1.0;
    bool discrete_ = true;
    bool compact_ = true;
    std::size_t identity_ = 0;
    std::size_t dual_identity_ = 0;
};

// Dual group descriptor: kinds flip compact<->discrete; truncation metadata kept.
struct DualSpec {
    GroupSpec structure;      // best structural description of the dual
    std::vector<Axis> axes;   // dual axes (primal/dual roles swapped)
    bool discrete;            // the dual group's own topology
    bool compact;
};

DualSpec dual(const GroupSpec& g);
// Dual of the dual; structurally equal to the original within truncation metadata.
GroupSpec bidual(const GroupSpec& g);
bool structurally_equal(const GroupSpec& a, const GroupSpec& b, double tol = 1e-12);

// Topological isomorphism between supported groups.  Map descriptor: an optional
// factor permutation, a unit integer multiplier per finite axis (x -> a*x), and
// a real scale per RealLine axis (x -> c*x).  The modulus mu satisfies
// m_target(h(A)) = mu(h) * m_source(A); it is 1 on discrete or compact groups and
// the product of |c| over RealLine axes otherwise.
struct Isomorphism {
    GroupSpec source;
    GroupSpec target;
    std::vector<int> factor_perm;        // image factor of each source factor
    std::vector<long long> multiplier;   // per-axis; must be a unit mod m on finite axes
    std::vector<double> scale;           // per-axis; != 0 only meaningful on RealLine axes
    double modulus = 1.0;
};

Isomorphism identity_isomorphism(const GroupSpec& g);
// x -> a*x on every Cyclic/Lattice/Torus axis (requires gcd(a, m) = 1 on finite axes).
Isomorphism make_multiplier_automorphism(const GroupSpec& g, long long a);
// x -> c*x on RealLine (target window rescaled accordingly).
Isomorphism make_real_scaling(const GroupSpec& g, double c);
Isomorphism make_factor_permutation(const GroupSpec& g, std::vector<int> perm);
Isomorphism compose(const Isomorphism& f, const Isomorphism& g); // f after g
Isomorphism inverse(const Isomorphism& h);
double modulus(const Isomorphism& h);

// Site relabeling for finite groups: index of h(x_site) in the target enumeration.
std::size_t apply(const Isomorphism& h, const Group& source, std::size_t site);

} // namespace she
