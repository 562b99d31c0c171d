#pragma once

// Experiment configuration: a single JSON document with schema tag "she/1".
// Parsing is strict — unknown keys anywhere are errors — and every module
// precondition that can be checked without computing is checked here.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "she/excitation.hpp"
#include "she/group.hpp"
#include "she/levy.hpp"
#include "she/sigma.hpp"
#include "she/u0.hpp"
#include "she/version.hpp"

namespace she::app {

enum class ExperimentKind {
    Kernel,
    Upsilon,
    Volterra,
    Mc,
    Sweep,
    LocalTime,
    Invariance,
    Dichotomy,
    VerifyAll,
};

std::string to_string(ExperimentKind kind);

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int points = 0;
    bool log_spaced = true;

    std::vector<double> materialize() const;
};

struct AutomorphismSpec {
    std::vector<long long> multipliers; // one per axis
    std::vector<int> factor_perm;       // optional factor permutation
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::VerifyAll;

    // Either a catalog id or an explicit group+levy pair.
    std::optional<std::string> model_id;
    std::optional<GroupSpec> group;
    std::optional<ExponentSpec> levy;
    Normalization normalization = Normalization::Default;

    std::optional<InitialData> u0; // falls back to the catalog default
    SigmaSpec sigma = SigmaSpec::linear(1.0);
    SigmaFunction sigma_fn = SigmaFunction::Linear;

    double t = 1.0;
    std::optional<double> lambda;       // scalar, for volterra / mc / kernel-free runs
    std::optional<GridSpec> lambda_grid; // for sweep
    std::optional<GridSpec> beta_grid;   // for upsilon
    SweepSource source = SweepSource::Volterra;

    double dt = 1e-3;
    long long n_paths = 1000;
    std::uint64_t seed = kDefaultSeed;
    int threads = 0;

    AutomorphismSpec automorphism;

    std::string output_dir = "out";
    std::vector<std::string> formats{"csv", "json"};

    std::string canonical; // sorted-key JSON dump of the parsed document
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// The documented schema, printed by `shecli print-schema`.
std::string schema_text();

// FNV-1a 64-bit, used for the manifest's config hash.
std::uint64_t fnv1a(std::string_view bytes);

} // namespace she::app
