#include "she/catalog.hpp"

#include <numbers>

#include "she/errors.hpp"
#include "she/spectral.hpp"

namespace she {

namespace {

// kappa = 1/(8 pi^2) normalizes the torus diffusion so the symmetrized
// spectral gap is exactly 1:  2 Re Psi(k) = k^2.
constexpr double kTorusKappa = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi);

std::vector<CatalogEntry> build() {
    std::vector<CatalogEntry> v;

    v.push_back({"trivial", "one-point group, no motion",
                 GroupSpec::trivial(), ExponentSpec::zero(), InitialData::point_mass(),
                 /*discrete=*/true, /*dalang=*/true});

    v.push_back({"cyclic2", "Z/2 with unit swap rate",
                 GroupSpec::cyclic(2), ExponentSpec::cyclic_rates({1.0}),
                 InitialData::point_mass(), true, true});

    v.push_back({"cyclic3", "Z/3 with unit rate to both neighbours",
                 GroupSpec::cyclic(3), ExponentSpec::cyclic_rates({1.0, 1.0}),
                 InitialData::point_mass(), true, true});

    v.push_back({"cyclic5", "Z/5 symmetric nearest-neighbour walk",
                 GroupSpec::cyclic(5), ExponentSpec::cyclic_rates({1.0, 0.0, 0.0, 1.0}),
                 InitialData::point_mass(), true, true});

    v.push_back({"cyclic6", "Z/6 symmetric nearest-neighbour walk",
                 GroupSpec::cyclic(6), ExponentSpec::cyclic_rates({1.0, 0.0, 0.0, 0.0, 1.0}),
                 InitialData::point_mass(), true, true});

    v.push_back({"lattice1d", "Z (radius-8 window) simple random walk, rate 1",
                 GroupSpec::lattice(1, 1.0, 8),
                 ExponentSpec::lattice_walk(1.0, {{{1}, 0.5}, {{-1}, 0.5}}),
                 InitialData::point_mass(), true, true});

    v.push_back({"product_c2_c3", "Z/2 x Z/3 with independent unit-rate factors",
                 GroupSpec::product({GroupSpec::cyclic(2), GroupSpec::cyclic(3)}),
                 ExponentSpec::product({ExponentSpec::cyclic_rates({1.0}),
                                        ExponentSpec::cyclic_rates({1.0, 1.0})}),
                 InitialData::point_mass(), true, true});

    v.push_back({"torus", "circle with Brownian motion (65 modes)",
                 GroupSpec::torus(65), ExponentSpec::torus_brownian(kTorusKappa),
                 InitialData::constant_one(), false, true});

    v.push_back({"torus9", "circle with Brownian motion, coarse grid for Monte Carlo",
                 GroupSpec::torus(9), ExponentSpec::torus_brownian(kTorusKappa),
                 InitialData::constant_one(), false, true});

    v.push_back({"stable2", "real line, alpha = 2 (Gaussian) motion",
                 GroupSpec::real_line(10.0, 2000), ExponentSpec::stable(2.0),
                 InitialData::gaussian(1.0), false, true});

    v.push_back({"stable15", "real line, alpha = 1.5 stable motion",
                 GroupSpec::real_line(10.0, 2000), ExponentSpec::stable(1.5),
                 InitialData::gaussian(1.0), false, true});

    v.push_back({"stable125", "real line, alpha = 1.25 stable motion",
                 GroupSpec::real_line(10.0, 2000), ExponentSpec::stable(1.25),
                 InitialData::gaussian(1.0), false, true});

    // R x T: the spectral divergence weights add up to 1, so Upsilon diverges
    // and only truncated-dual comparisons (e.g. the projection inequality)
    // apply to this entry.
    v.push_back({"product_stable2_torus", "real line x circle, independent Gaussian motions",
                 GroupSpec::product({GroupSpec::real_line(10.0, 512), GroupSpec::torus(33)}),
                 ExponentSpec::product({ExponentSpec::stable(2.0),
                                        ExponentSpec::torus_brownian(kTorusKappa)}),
                 InitialData::gaussian(1.0), false, false});

    return v;
}

} // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = build();
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& id) {
    for (const auto& e : catalog())
        if (e.id == id) return e;
    throw ConfigError("unknown catalog model: " + id);
}

std::vector<std::string> catalog_ids() {
    std::vector<std::string> ids;
    for (const auto& e : catalog()) ids.push_back(e.id);
    return ids;
}

LevyModel make_model(const CatalogEntry& entry, Normalization norm) {
    return LevyModel(entry.group, entry.exponent, norm);
}

std::vector<DichotomyCase> dichotomy_cases() {
    std::vector<DichotomyCase> cases;
    for (const char* id : {"trivial", "cyclic2", "cyclic6", "lattice1d", "product_c2_c3",
                           "torus", "stable2", "stable15", "stable125"}) {
        const CatalogEntry& e = catalog_entry(id);
        cases.push_back({e.id, make_model(e), e.u0});
    }
    return cases;
}

} // namespace she
