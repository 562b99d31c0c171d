#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "she/catalog.hpp"
#include "she/errors.hpp"
#include "she/levy.hpp"
#include "she/quadrature.hpp"
#include "she/spectral.hpp"

using namespace she;

namespace {

constexpr double kPi = std::numbers::pi;

LevyModel model_of(const std::string& id) { return make_model(catalog_entry(id)); }

} // namespace

TEST_CASE("the walk exponent matches its defining character sum") {
    // Re Psi(chi_k) = sum_j kappa_j (1 - cos(2 pi j k / n))
    const LevyModel m = model_of("cyclic6"); // nearest-neighbor rates {1,0,0,0,1}
    for (std::size_t k = 0; k < 6; ++k) {
        const double expect = (1.0 - std::cos(2.0 * kPi * static_cast<double>(k) / 6.0)) +
                              (1.0 - std::cos(2.0 * kPi * 5.0 * static_cast<double>(k) / 6.0));
        CHECK(m.re_psi(k) == doctest::Approx(expect).epsilon(1e-13));
    }
    CHECK(m.max_re_psi() == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("Upsilon is the Laplace transform of the return density") {
    // Independent route: quadrature of e^{-beta s} pbar_s(0) against the
    // resolvent sum.  Valid verbatim on finite duals where pbar_0(0) is finite.
    for (const char* id : {"trivial", "cyclic2", "cyclic6", "product_c2_c3", "lattice1d"}) {
        const LevyModel m = model_of(id);
        for (double beta : {0.5, 1.0, 3.0}) {
            const double direct = upsilon(m, beta);
            const double laplace = quad::integrate_to_inf(
                // pbar0 insists on t > 0; its t -> 0+ limit (the total dual
                // mass) is what the endpoint evaluation needs.
                [&](double s) { return std::exp(-beta * s) * pbar0(m, std::max(s, 1e-300)); },
                0.0, 1e-12);
            CHECK(direct == doctest::Approx(laplace).epsilon(1e-9));
        }
    }
}

TEST_CASE("Upsilon of the quadratic exponent matches its half-line integral") {
    // (1/pi) int_0^inf dxi / (beta + 2 xi^alpha), evaluated numerically with a
    // power-law tail correction, against the closed form used by the library.
    const LevyModel m = model_of("stable15");
    const double alpha = 1.5;
    for (double beta : {0.25, 1.0, 4.0}) {
        const double X = 1e5;
        // substitute xi = u^2 so the xi^(3/2) cusp at 0 becomes the smooth
        // integrand 2u/(beta + 2u^3); the quadrature needs bounded derivatives
        const double head = quad::integrate(
            [&](double u) { return 2.0 * u / (beta + 2.0 * std::pow(u, 2.0 * alpha)); }, 0.0,
            std::sqrt(X), 1e-13);
        const double tail = std::pow(X, 1.0 - alpha) / (2.0 * (alpha - 1.0)) -
                            beta * std::pow(X, 1.0 - 2.0 * alpha) / (4.0 * (2.0 * alpha - 1.0));
        const double oracle = (head + tail) / kPi;
        CHECK(upsilon(m, beta) == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("the Gaussian return density and its time integral have closed forms") {
    const LevyModel m = model_of("stable2");
    for (double t : {0.25, 1.0, 4.0}) {
        CHECK(pbar0(m, t) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0 * kPi * t))).epsilon(1e-9));
        CHECK(pbar_integral(m, t) == doctest::Approx(std::sqrt(t / (2.0 * kPi))).epsilon(1e-9));
    }
}

TEST_CASE("the circle return density is a theta sum, smooth across the Poisson switch") {
    const LevyModel m = model_of("torus"); // kappa chosen so 2 Re Psi(n) = n^2
    // direct lattice sum, rapidly convergent at t = pi
    double theta = 0.0;
    for (int n = -60; n <= 60; ++n) theta += std::exp(-kPi * n * n);
    CHECK(pbar0(m, kPi) == doctest::Approx(theta).epsilon(1e-13));
    // representation switch does not move the value
    CHECK(pbar0(m, kPi - 1e-9) == doctest::Approx(pbar0(m, kPi + 1e-9)).epsilon(1e-10));
    // small-time limit of the theta sum: pbar_t(0) ~ sqrt(pi / t) as t -> 0
    CHECK(pbar0(m, 1e-4) == doctest::Approx(std::sqrt(kPi / 1e-4)).epsilon(1e-6));
}

TEST_CASE("circle Upsilon agrees with a tail-corrected frequency sum") {
    const LevyModel m = model_of("torus");
    for (double beta : {0.3, 1.0, 7.0}) {
        const int N = 20000;
        double sum = 1.0 / beta;
        for (int n = 1; n <= N; ++n) sum += 2.0 / (beta + static_cast<double>(n) * n);
        // integral tail of 2/(beta + x^2) beyond N
        sum += 2.0 * (kPi / 2.0 - std::atan(N / std::sqrt(beta))) / std::sqrt(beta);
        CHECK(upsilon(m, beta) == doctest::Approx(sum).epsilon(1e-8));
    }
}

TEST_CASE("Dalang finiteness verdicts across the catalog") {
    CHECK(dalang_check(model_of("cyclic6")) == DalangVerdict::HoldsByDiscreteness);
    CHECK(dalang_check(model_of("lattice1d")) == DalangVerdict::HoldsByDiscreteness);
    CHECK(dalang_check(model_of("stable125")) == DalangVerdict::Holds);
    CHECK(dalang_check(model_of("torus")) == DalangVerdict::Holds);
    CHECK(dalang_check(model_of("product_stable2_torus")) == DalangVerdict::Fails);

    const LevyModel bad(GroupSpec::real_line(10.0, 500), ExponentSpec::stable(0.9));
    CHECK(dalang_check(bad) == DalangVerdict::Fails);
    CHECK_FALSE(dalang_ok(bad));
    CHECK_THROWS_AS(upsilon(bad, 1.0), NumericError);

    const LevyModel edge(GroupSpec::real_line(10.0, 500), ExponentSpec::stable(1.0));
    CHECK(dalang_check(edge) == DalangVerdict::Fails); // weight exactly 1 diverges
}

TEST_CASE("heat kernels are symmetric probability densities") {
    for (const char* id : {"cyclic6", "lattice1d", "product_c2_c3", "torus", "stable15"}) {
        const LevyModel m = model_of(id);
        const Group& g = m.group();
        const std::vector<double> p = heat_kernel(m, 0.7);
        double mass = 0.0;
        for (std::size_t s = 0; s < p.size(); ++s) {
            CHECK(p[s] >= -1e-15);
            CHECK(p[s] == doctest::Approx(p[g.neg(s)]).epsilon(1e-11)); // symmetric jump laws
            mass += p[s];
        }
        CHECK(mass * g.haar_weight() == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(heat_kernel(model_of("cyclic2"), 0.0), NumericError);
    // too-small t on a truncated continuum dual cannot be resolved
    CHECK_THROWS_AS(heat_kernel(model_of("stable2"), 1e-9), NumericError);
}

TEST_CASE("upsilon_inverse inverts upsilon over many scales") {
    for (const char* id : {"cyclic2", "stable15"}) {
        const LevyModel m = model_of(id);
        for (double y : {0.01, 0.3, 2.0}) {
            const double beta = upsilon_inverse(m, y);
            CHECK(upsilon(m, beta) == doctest::Approx(y).epsilon(1e-8));
        }
    }
    // monotone decreasing in beta
    const LevyModel m = model_of("cyclic6");
    CHECK(upsilon(m, 0.5) > upsilon(m, 1.0));
    CHECK(upsilon(m, 1.0) > upsilon(m, 5.0));
}

TEST_CASE("tauberian sandwich brackets the exact return-density integral") {
    const LevyModel m = model_of("cyclic2"); // Re Psi in {0, 2}, dual weights 1/2
    const double t = 1.0;
    const TauberianReport rep = tauberian_check(m, t);
    const double middle_oracle = 0.5 * (t + (1.0 - std::exp(-4.0 * t)) / 4.0);
    CHECK(rep.middle == doctest::Approx(middle_oracle).epsilon(1e-12));
    CHECK(rep.lower == doctest::Approx(upsilon(m, 1.0 / t) / std::numbers::e).epsilon(1e-14));
    CHECK(rep.upper == doctest::Approx(upsilon(m, 1.0 / t) * std::numbers::e).epsilon(1e-14));
    CHECK(rep.lower <= rep.middle);
    CHECK(rep.middle <= rep.upper);
    CHECK(rep.ok);
}

TEST_CASE("projection onto a factor never exceeds the product transform") {
    const LevyModel m = model_of("product_c2_c3");
    std::vector<double> betas;
    for (int i = 0; i < 12; ++i) betas.push_back(0.2 * (i + 1));
    const ProjectionReport rep = projection_compare(m, betas);
    REQUIRE(rep.beta.size() == betas.size());
    for (std::size_t i = 0; i < rep.beta.size(); ++i)
        CHECK(rep.upsilon_proj[i] <= rep.upsilon_full[i] * (1.0 + 1e-12));
    CHECK(rep.ok);
}

TEST_CASE("spectral atoms merge equal decay rates and conserve dual mass") {
    const LevyModel m = model_of("cyclic6");
    const SpectralAtoms at = spectral_atoms(m);
    // Re Psi over k = 0..5 is {0, 1, 3, 4, 3, 1}; rates are 2 Re Psi merged
    REQUIRE(at.rate.size() == 4);
    CHECK(at.rate[0] == doctest::Approx(0.0));
    CHECK(at.rate[1] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(at.rate[2] == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(at.rate[3] == doctest::Approx(8.0).epsilon(1e-13));
    const std::vector<double> expect_w = {1.0 / 6, 2.0 / 6, 2.0 / 6, 1.0 / 6};
    double total = 0.0;
    for (std::size_t i = 0; i < at.rate.size(); ++i) {
        CHECK(std::exp(at.log_weight[i]) == doctest::Approx(expect_w[i]).epsilon(1e-13));
        total += std::exp(at.log_weight[i]);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("the truncated-dual sum equals the exact transform on finite groups") {
    const LevyModel m = model_of("product_c2_c3");
    for (double beta : {0.5, 1.0, 2.5})
        CHECK(upsilon_truncated(m, beta) == doctest::Approx(upsilon(m, beta)).epsilon(1e-13));
}

TEST_CASE("upsilon_profile records the grid and the finiteness verdict") {
    const UpsilonProfile ok = upsilon_profile(model_of("cyclic2"), 0.1, 10.0, 5);
    REQUIRE(ok.beta.size() == 5);
    REQUIRE(ok.value.size() == 5);
    CHECK(ok.dalang_finite);
    CHECK(ok.beta.front() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(ok.beta.back() == doctest::Approx(10.0).epsilon(1e-12));

    const UpsilonProfile bad = upsilon_profile(model_of("product_stable2_torus"), 0.1, 10.0, 5);
    CHECK_FALSE(bad.dalang_finite);
    CHECK(bad.value.empty());
    CHECK(bad.beta.size() == 5);
}
