#pragma once

// Named model catalog used by the verification suite, the dichotomy report
// and the CLI: each entry bundles a group, a jump/diffusion exponent and a
// compatible initial condition.

#include <string>
#include <vector>

#include "she/excitation.hpp"
#include "she/levy.hpp"
#include "she/u0.hpp"

namespace she {

struct CatalogEntry {
    std::string id;
    std::string description;
    GroupSpec group;
    ExponentSpec exponent;
    InitialData u0;
    bool discrete = false;
    bool dalang = false; // moment theory available (Upsilon finite for beta > 0)
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& id); // throws ConfigError if unknown
std::vector<std::string> catalog_ids();

LevyModel make_model(const CatalogEntry& entry, Normalization norm = Normalization::Default);

// The models behind the dichotomy table: discrete rows fit Volterra sweeps,
// connected rows fit the lower-bound series.
std::vector<DichotomyCase> dichotomy_cases();

} // namespace she
