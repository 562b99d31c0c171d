#include <cmath>
#include <vector>

#include "doctest.h"
#include "she/catalog.hpp"
#include "she/errors.hpp"
#include "she/levy.hpp"
#include "she/simulate.hpp"
#include "she/volterra.hpp"

using namespace she;

namespace {

LevyModel model_of(const std::string& id) { return make_model(catalog_entry(id)); }

SimConfig small_cfg(double lambda) {
    SimConfig cfg;
    cfg.lambda = lambda;
    cfg.t_end = 0.5;
    cfg.dt = 0.01;
    cfg.n_paths = 200;
    cfg.threads = 1;
    cfg.u0 = InitialData::point_mass();
    return cfg;
}

} // namespace

TEST_CASE("same seed reproduces the estimate bitwise, a new seed moves it") {
    const LevyModel m = model_of("cyclic3");
    SimConfig cfg = small_cfg(0.8);
    const McEstimate a = simulate_energy(m, cfg);
    const McEstimate b = simulate_energy(m, cfg);
    CHECK(a.mean == b.mean);
    CHECK(a.se == b.se);
    cfg.seed += 1;
    const McEstimate c = simulate_energy(m, cfg);
    CHECK(c.mean != a.mean);
}

TEST_CASE("thread count never changes the result") {
    const LevyModel m = model_of("cyclic6");
    SimConfig cfg = small_cfg(1.2);
    cfg.threads = 1;
    const McEstimate one = simulate_energy(m, cfg);
    cfg.threads = 2;
    const McEstimate two = simulate_energy(m, cfg);
    cfg.threads = 0; // hardware concurrency
    const McEstimate hw = simulate_energy(m, cfg);
    CHECK(one.mean == two.mean);
    CHECK(one.se == two.se);
    CHECK(one.mean == hw.mean);
}

TEST_CASE("noise_scale multiplies the coupling: (lambda, 2) == (2 lambda, 1) bitwise") {
    const LevyModel m = model_of("cyclic3");
    SimConfig a = small_cfg(1.0);
    a.noise_scale = 2.0;
    SimConfig b = small_cfg(2.0);
    b.noise_scale = 1.0;
    const McEstimate ra = simulate_energy(m, a);
    const McEstimate rb = simulate_energy(m, b);
    CHECK(ra.mean == rb.mean);
    CHECK(ra.se == rb.se);
}

TEST_CASE("zero coupling collapses onto the deterministic semigroup energy") {
    const LevyModel m = model_of("cyclic6");
    SimConfig cfg = small_cfg(0.0);
    const McEstimate est = simulate_energy(m, cfg);
    const double det = std::exp(deterministic_energy(m, cfg.u0, cfg.t_end));
    CHECK(est.mean == doctest::Approx(det).epsilon(1e-10));
    CHECK(est.se <= 1e-12 * det);
}

TEST_CASE("time-step guards and engine dispatch") {
    const LevyModel disc = model_of("cyclic6");
    const LevyModel grid = model_of("torus9");
    SimConfig cfg = small_cfg(0.5);

    SimConfig coarse = cfg;
    coarse.dt = 0.5; // total jump rate 2 -> dt * rate = 1 > 0.1
    CHECK_THROWS_AS(simulate_energy(disc, coarse), ConfigError);

    CHECK_THROWS_AS(simulate_grid(disc, cfg), ConfigError);
    CHECK_THROWS_AS(simulate_energy(grid, cfg), ConfigError);

    SimConfig coarse_grid = cfg;
    coarse_grid.dt = 0.2; // max Re Psi = 8 -> dt * 8 = 1.6 > 0.5
    coarse_grid.u0 = InitialData::constant_one();
    CHECK_THROWS_AS(simulate_grid(grid, coarse_grid), ConfigError);

    SimConfig nopaths = cfg;
    nopaths.n_paths = 0;
    CHECK_THROWS_AS(simulate_energy(disc, nopaths), ConfigError);
}

TEST_CASE("grid engine at zero coupling preserves the constant profile") {
    const LevyModel m = model_of("torus9");
    SimConfig cfg = small_cfg(0.0);
    cfg.dt = 0.02; // dt * max Re Psi = 0.16
    cfg.u0 = InitialData::constant_one();
    const McEstimate est = simulate_grid(m, cfg);
    // P_t 1 = 1 and the Haar measure is a probability, so the energy is 1.
    CHECK(est.mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("local-time identity: single-point group is exact") {
    const LevyModel m = model_of("trivial");
    const LocalTimeReport r = local_time_identity(m, 10, 7);
    CHECK(r.lhs == 1.0);
    CHECK(r.se == 0.0);
    CHECK(r.rhs == 1.0);
    CHECK(r.rhs_two_upsilon1 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.constant_mismatch); // 2 Upsilon(1) = 2 is not the identity's constant
    CHECK(r.ok);
}

TEST_CASE("local-time identity on Z/3 matches the exact spectral value 1/2") {
    const LevyModel m = model_of("cyclic3");
    // Re Psi = {0, 3, 3}: rhs = (1/3)(1 + 1/4 + 1/4) = 1/2,
    // while 2 Upsilon(1) = (2/3)(1 + 1/7 + 1/7) = 6/7.
    const LocalTimeReport r = local_time_identity(m, 20000, kDefaultSeed);
    CHECK(r.rhs == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(r.rhs_two_upsilon1 == doctest::Approx(6.0 / 7.0).epsilon(1e-13));
    CHECK(r.constant_mismatch);
    CHECK(r.se > 0.0);
    CHECK(std::abs(r.lhs - r.rhs) <= 3.0 * r.se);
    CHECK(r.ok);
}

TEST_CASE("local-time identity rejects continuum groups") {
    const LevyModel m = model_of("torus9");
    CHECK_THROWS_AS(local_time_identity(m, 10, 1), ConfigError);
}

TEST_CASE("automorphism invariance: transported run is an exact relabeling") {
    const LevyModel m = model_of("cyclic5");
    SimConfig cfg = small_cfg(0.7);
    cfg.n_paths = 50;
    const Isomorphism h = make_multiplier_automorphism(m.group().spec(), 2);
    const InvarianceReport r = invariance_check(m, cfg, h);
    CHECK(r.max_abs_path_diff == 0.0);
    CHECK(r.kernel_pushforward_error < 1e-12);
    CHECK(r.ok);
}

TEST_CASE("invariance check rejects a map for the wrong group") {
    const LevyModel m = model_of("cyclic5");
    SimConfig cfg = small_cfg(0.7);
    const Isomorphism h = make_multiplier_automorphism(GroupSpec::cyclic(6), 5);
    CHECK_THROWS_AS(invariance_check(m, cfg, h), ConfigError);
}

TEST_CASE("Monte Carlo agrees with the exact moment curve within noise") {
    const LevyModel m = model_of("cyclic3");
    SimConfig cfg = small_cfg(0.5);
    cfg.n_paths = 2000;
    const McEstimate est = simulate_energy(m, cfg);
    const std::vector<double> tg = {cfg.t_end};
    const double truth =
        std::exp(solve_volterra(m, cfg.u0, SigmaSpec::linear(1.0), cfg.lambda, tg)
                     .log_energy_sq.back());
    // 5 sigma plus a small allowance for the O(dt) weak error of the stepper
    CHECK(std::abs(est.mean - truth) <= 5.0 * est.se + 0.02 * truth);
}
