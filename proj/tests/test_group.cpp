#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "she/group.hpp"

using namespace she;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_field(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> f(n);
    for (double& v : f) v = u(gen);
    return f;
}

} // namespace

TEST_CASE("cyclic pairing is the exact root-of-unity character") {
    const Group g(GroupSpec::cyclic(7));
    for (std::size_t x = 0; x < 7; ++x) {
        for (std::size_t k = 0; k < 7; ++k) {
            // oracle: integer product mod 7 decides the phase, nothing else
            const auto expect = std::polar(1.0, 2.0 * kPi * static_cast<double>((x * k) % 7) / 7.0);
            CHECK(std::abs(g.pairing(x, k) - expect) < 1e-14);
            CHECK(std::abs(std::abs(g.pairing(x, k)) - 1.0) < 1e-15);
        }
    }
    // characters are multiplicative in the site argument
    for (std::size_t x = 0; x < 7; ++x)
        for (std::size_t y = 0; y < 7; ++y)
            for (std::size_t k = 0; k < 7; ++k)
                CHECK(std::abs(g.pairing(g.add(x, y), k) - g.pairing(x, k) * g.pairing(y, k)) <
                      5e-15);
}

TEST_CASE("every axis satisfies w_x * w_xi * m = 1") {
    const std::vector<GroupSpec> specs = {
        GroupSpec::cyclic(6),
        GroupSpec::lattice(2, 0.5, 3),
        GroupSpec::torus(9),
        GroupSpec::real_line(5.0, 64),
        GroupSpec::product({GroupSpec::cyclic(2), GroupSpec::torus(9)}),
    };
    for (const GroupSpec& spec : specs) {
        for (Normalization norm : {Normalization::Default, Normalization::CompactProbability}) {
            if (norm == Normalization::CompactProbability && !is_compact(spec))
                continue; // probability Haar measure only exists on compact groups
            const Group g(spec, norm);
            for (const Axis& ax : g.axes())
                CHECK(std::abs(ax.w_x * ax.w_xi * static_cast<double>(ax.m) - 1.0) < 1e-14);
        }
    }
}

TEST_CASE("real-line axes carry Lebesgue weights and the 2 pi dual convention") {
    const Group g(GroupSpec::real_line(5.0, 64));
    REQUIRE(g.axes().size() == 1);
    const Axis& ax = g.axes().front();
    const double dx = 10.0 / 64.0;
    CHECK(ax.m == 64);
    CHECK(ax.x_step == doctest::Approx(dx).epsilon(1e-15));
    CHECK(ax.w_x == doctest::Approx(dx).epsilon(1e-15));
    CHECK(ax.xi_step == doctest::Approx(2.0 * kPi / (64.0 * dx)).epsilon(1e-15));
    CHECK(ax.w_xi == doctest::Approx(ax.xi_step / (2.0 * kPi)).epsilon(1e-15));
    CHECK(ax.x_center == 32);
    CHECK_FALSE(g.discrete());
    CHECK_FALSE(g.compact());
}

TEST_CASE("Fourier inversion and Parseval hold on random fields") {
    const std::vector<GroupSpec> specs = {
        GroupSpec::product({GroupSpec::cyclic(3), GroupSpec::cyclic(4)}),
        GroupSpec::torus(9),
        GroupSpec::real_line(4.0, 32),
    };
    unsigned seed = 11;
    for (const GroupSpec& spec : specs) {
        const Group g(spec);
        const std::vector<double> f = random_field(g.size(), seed++);
        const auto fh = g.fourier(f);
        const auto back = g.inverse_fourier(fh);
        double worst = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            worst = std::max(worst, std::abs(back[i].real() - f[i]));
            worst = std::max(worst, std::abs(back[i].imag()));
        }
        CHECK(worst < 1e-12);
        CHECK(g.norm_sq(f) == doctest::Approx(g.dual_norm_sq(fh)).epsilon(1e-12));
    }
}

TEST_CASE("the point mass transforms to the constant function on the dual") {
    const Group g(GroupSpec::cyclic(5));
    std::vector<double> f(5, 0.0);
    f[g.identity()] = 1.0; // counting measure: w_x = 1
    const auto fh = g.fourier(f);
    for (const auto& v : fh) CHECK(std::abs(v - 1.0) < 1e-15);
}

TEST_CASE("site arithmetic forms an abelian group") {
    for (const GroupSpec& spec :
         {GroupSpec::cyclic(6), GroupSpec::product({GroupSpec::cyclic(2), GroupSpec::cyclic(3)})}) {
        const Group g(spec);
        const std::size_t n = g.size();
        for (std::size_t a = 0; a < n; ++a) {
            CHECK(g.add(a, g.identity()) == a);
            CHECK(g.add(a, g.neg(a)) == g.identity());
            for (std::size_t b = 0; b < n; ++b) {
                CHECK(g.add(a, b) == g.add(b, a));
                for (std::size_t c = 0; c < n; ++c)
                    CHECK(g.add(g.add(a, b), c) == g.add(a, g.add(b, c)));
            }
        }
    }
}

TEST_CASE("decompose and compose are mutually inverse") {
    const Group g(GroupSpec::product({GroupSpec::cyclic(3), GroupSpec::cyclic(5)}));
    REQUIRE(g.size() == 15);
    std::vector<int> digits(g.axes().size());
    for (std::size_t s = 0; s < g.size(); ++s) {
        g.decompose(s, digits);
        CHECK(digits[0] >= 0);
        CHECK(digits[0] < 3);
        CHECK(digits[1] >= 0);
        CHECK(digits[1] < 5);
        CHECK(g.compose(digits) == s);
    }
}

TEST_CASE("multiplier automorphisms are homomorphisms that compose and invert") {
    const GroupSpec spec = GroupSpec::cyclic(5);
    const Group g(spec);
    const Isomorphism h = make_multiplier_automorphism(spec, 2);
    CHECK(modulus(h) == doctest::Approx(1.0).epsilon(1e-15));

    // homomorphism property and permutation of sites
    std::vector<bool> hit(5, false);
    for (std::size_t x = 0; x < 5; ++x) {
        hit[apply(h, g, x)] = true;
        for (std::size_t y = 0; y < 5; ++y)
            CHECK(apply(h, g, g.add(x, y)) == g.add(apply(h, g, x), apply(h, g, y)));
    }
    for (bool b : hit) CHECK(b);

    // h(h(x)) is multiplication by 4; h^{-1} undoes h
    const Isomorphism hh = compose(h, h);
    const Isomorphism h4 = make_multiplier_automorphism(spec, 4);
    const Isomorphism hinv = inverse(h);
    for (std::size_t x = 0; x < 5; ++x) {
        CHECK(apply(hh, g, x) == apply(h4, g, x));
        CHECK(apply(hinv, g, apply(h, g, x)) == x);
    }
}

TEST_CASE("non-unit multipliers are rejected") {
    CHECK_THROWS_AS(make_multiplier_automorphism(GroupSpec::cyclic(6), 2), ConfigError);
    CHECK_THROWS_AS(make_multiplier_automorphism(GroupSpec::cyclic(6), 3), ConfigError);
    CHECK_NOTHROW(make_multiplier_automorphism(GroupSpec::cyclic(6), 5));
}

TEST_CASE("factor permutations relabel coordinates consistently") {
    const GroupSpec spec = GroupSpec::product({GroupSpec::cyclic(2), GroupSpec::cyclic(3)});
    const Group g(spec);
    const Isomorphism h = make_factor_permutation(spec, {1, 0});
    const Group target(h.target);
    REQUIRE(target.size() == 6);
    std::vector<int> sd(2), td(2);
    for (std::size_t s = 0; s < g.size(); ++s) {
        g.decompose(s, sd);
        target.decompose(apply(h, g, s), td);
        CHECK(td[0] == sd[1]);
        CHECK(td[1] == sd[0]);
    }
}

TEST_CASE("duality flips topology and the bidual returns the original structure") {
    const DualSpec dc = dual(GroupSpec::cyclic(6));
    CHECK(dc.discrete);
    CHECK(dc.compact);
    CHECK(structurally_equal(dc.structure, GroupSpec::cyclic(6)));

    const DualSpec dt = dual(GroupSpec::torus(9));
    CHECK(dt.discrete);
    CHECK_FALSE(dt.compact);

    const DualSpec dl = dual(GroupSpec::lattice(1, 1.0, 4));
    CHECK_FALSE(dl.discrete);
    CHECK(dl.compact);

    for (const GroupSpec& spec :
         {GroupSpec::cyclic(6), GroupSpec::torus(9),
          GroupSpec::product({GroupSpec::cyclic(2), GroupSpec::cyclic(3)})})
        CHECK(structurally_equal(bidual(spec), spec));
}

TEST_CASE("the trivial group compiles to a single point of mass one") {
    const Group g(GroupSpec::trivial());
    CHECK(g.size() == 1);
    CHECK(g.axes().empty());
    CHECK(g.haar_weight() == 1.0);
    CHECK(g.dual_weight() == 1.0);
    CHECK(g.finite());
    CHECK(std::abs(g.pairing(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("invalid group specs are rejected with config errors") {
    CHECK_THROWS_AS(Group(GroupSpec::cyclic(0)), ConfigError);
    CHECK_THROWS_AS(Group(GroupSpec::cyclic(-3)), ConfigError);
    CHECK_THROWS_AS(Group(GroupSpec::real_line(-1.0, 32)), ConfigError);
    CHECK_THROWS_AS(Group(GroupSpec::torus(0)), ConfigError);
    CHECK_THROWS_AS(Group(GroupSpec::product({})), ConfigError);
}
