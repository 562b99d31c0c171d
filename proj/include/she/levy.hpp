#pragma once

// Characteristic exponents Psi on the dual group, and the LevyModel that pairs
// a group with an exponent.  Kinds:
//   Zero          — constant process (any group)
//   CyclicRates   — continuous-time walk on Z_n with jump rates kappa_1..kappa_{n-1}
//   LatticeWalk   — rate-kappa walk on delta*Z^d with a finite jump law J
//   Stable        — Psi(xi) = |xi|^alpha on the line, alpha in (0,2]
//   TorusBrownian — Psi(n) = kappa*(2*pi*n)^2 on the circle
//   ProductIndependent — independent components, Psi adds across factors

#include <complex>
#include <cstddef>
#include <vector>

#include "she/group.hpp"

namespace she {

enum class ExponentKind { Zero, CyclicRates, LatticeWalk, Stable, TorusBrownian, ProductIndependent };

struct LatticeJump {
    std::vector<int> offset; // in lattice units, one entry per dimension
    double prob = 0.0;
};

struct ExponentSpec {
    ExponentKind kind = ExponentKind::Zero;
    std::vector<double> rates;            // CyclicRates: kappa_1..kappa_{n-1}
    double rate = 1.0;                    // LatticeWalk kappa, TorusBrownian kappa
    std::vector<LatticeJump> jumps;       // LatticeWalk law J (probabilities sum to 1)
    double alpha = 2.0;                   // Stable
    std::vector<ExponentSpec> components; // ProductIndependent, one per group factor

    static ExponentSpec zero();
    static ExponentSpec cyclic_rates(std::vector<double> rates);
    static ExponentSpec lattice_walk(double kappa, std::vector<LatticeJump> jumps);
    static ExponentSpec stable(double alpha);
    static ExponentSpec torus_brownian(double kappa);
    static ExponentSpec product(std::vector<ExponentSpec> components);
};

// A validated (group, exponent) pair with the dual-grid exponent values cached.
class LevyModel {
public:
    LevyModel(GroupSpec group, ExponentSpec exponent,
              Normalization norm = Normalization::Default);

    const Group& group() const { return group_; }
    const ExponentSpec& exponent() const { return exponent_; }
    Normalization normalization() const { return norm_; }

    std::complex<double> psi(std::size_t chi) const;
    double re_psi(std::size_t chi) const { return re_psi_.at(chi); }
    const std::vector<double>& re_psi_grid() const { return re_psi_; }
    double max_re_psi() const { return max_re_psi_; }

    // One leaf per non-product (group factor, exponent component) pair.  The
    // specs are stored by value so the model stays freely copyable and movable.
    struct Leaf {
        GroupKind group_kind;
        ExponentKind exponent_kind;
        GroupSpec gspec;
        ExponentSpec espec;
        std::size_t axis_begin, axis_end; // slice of Group::axes()
        bool continuum;                   // factor is not discrete
    };
    const std::vector<Leaf>& leaves() const { return leaves_; }
    std::size_t continuum_leaf_count() const { return continuum_leaves_; }

    // Exponent restricted to one leaf, evaluated at the dual digit vector of
    // the full group (only the leaf's own axes are read).
    std::complex<double> psi_leaf(const Leaf& leaf, std::span<const int> digits) const;

    // Total jump intensity of the discrete part (sum of kappa rates); used by
    // the simulation dt validation rule.
    double total_jump_rate() const { return total_jump_rate_; }

private:
    Group group_;
    ExponentSpec exponent_;
    Normalization norm_;
    std::vector<Leaf> leaves_;
    std::vector<double> re_psi_;
    double max_re_psi_ = 0.0;
    double total_jump_rate_ = 0.0;
    std::size_t continuum_leaves_ = 0;
};

} // namespace she
