#include "she/app/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "she/errors.hpp"

namespace she::app {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::Kernel: return "kernel";
    case ExperimentKind::Upsilon: return "upsilon";
    case ExperimentKind::Volterra: return "volterra";
    case ExperimentKind::Mc: return "mc";
    case ExperimentKind::Sweep: return "sweep";
    case ExperimentKind::LocalTime: return "localtime";
    case ExperimentKind::Invariance: return "invariance";
    case ExperimentKind::Dichotomy: return "dichotomy";
    case ExperimentKind::VerifyAll: return "verify-all";
    }
    return "?";
}

std::vector<double> GridSpec::materialize() const {
    if (log_spaced) return she::log_spaced(min, max, points);
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] = min + (max - min) * i / (points - 1);
    return g;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where + " must be a table (JSON object)");
}

void expect_keys(const json& j, const std::string& where,
                 std::initializer_list<const char*> allowed) {
    expect_object(j, where);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail("unknown key '" + it.key() + "' in " + where);
    }
}

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where + " is missing required key '" + key + "'");
    return *it;
}

double get_double(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number()) fail(where + "." + key + " must be a number");
    return v.get<double>();
}

long long get_int(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number_integer()) fail(where + "." + key + " must be an integer");
    return v.get<long long>();
}

std::string get_string(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_string()) fail(where + "." + key + " must be a string");
    return v.get<std::string>();
}

GroupSpec parse_group(const json& j, const std::string& where) {
    expect_object(j, where);
    const std::string kind = get_string(j, "kind", where);
    if (kind == "trivial") {
        expect_keys(j, where, {"kind"});
        return GroupSpec::trivial();
    }
    if (kind == "cyclic") {
        expect_keys(j, where, {"kind", "n"});
        return GroupSpec::cyclic(static_cast<int>(get_int(j, "n", where)));
    }
    if (kind == "lattice") {
        expect_keys(j, where, {"kind", "dim", "delta", "radius"});
        return GroupSpec::lattice(static_cast<int>(get_int(j, "dim", where)),
                                  get_double(j, "delta", where),
                                  static_cast<int>(get_int(j, "radius", where)));
    }
    if (kind == "torus") {
        expect_keys(j, where, {"kind", "resolution"});
        return GroupSpec::torus(static_cast<int>(get_int(j, "resolution", where)));
    }
    if (kind == "real_line") {
        expect_keys(j, where, {"kind", "halfwidth", "resolution"});
        return GroupSpec::real_line(get_double(j, "halfwidth", where),
                                    static_cast<int>(get_int(j, "resolution", where)));
    }
    if (kind == "product") {
        expect_keys(j, where, {"kind", "factors"});
        const json& f = require(j, "factors", where);
        if (!f.is_array() || f.size() < 2) fail(where + ".factors must be an array of >= 2 groups");
        std::vector<GroupSpec> factors;
        for (std::size_t i = 0; i < f.size(); ++i)
            factors.push_back(parse_group(f[i], where + ".factors[" + std::to_string(i) + "]"));
        return GroupSpec::product(std::move(factors));
    }
    fail(where + ".kind '" + kind + "' is not a group kind");
}

ExponentSpec parse_levy(const json& j, const std::string& where) {
    expect_object(j, where);
    const std::string kind = get_string(j, "kind", where);
    if (kind == "zero") {
        expect_keys(j, where, {"kind"});
        return ExponentSpec::zero();
    }
    if (kind == "cyclic_rates") {
        expect_keys(j, where, {"kind", "rates"});
        const json& r = require(j, "rates", where);
        if (!r.is_array() || r.empty()) fail(where + ".rates must be a nonempty number array");
        std::vector<double> rates;
        for (const auto& v : r) {
            if (!v.is_number()) fail(where + ".rates must contain only numbers");
            rates.push_back(v.get<double>());
        }
        return ExponentSpec::cyclic_rates(std::move(rates));
    }
    if (kind == "lattice_walk") {
        expect_keys(j, where, {"kind", "rate", "jumps"});
        const json& js = require(j, "jumps", where);
        if (!js.is_array() || js.empty()) fail(where + ".jumps must be a nonempty array");
        std::vector<LatticeJump> jumps;
        for (std::size_t i = 0; i < js.size(); ++i) {
            const std::string jw = where + ".jumps[" + std::to_string(i) + "]";
            expect_keys(js[i], jw, {"offset", "prob"});
            const json& off = require(js[i], "offset", jw);
            if (!off.is_array() || off.empty()) fail(jw + ".offset must be an integer array");
            LatticeJump jump;
            for (const auto& v : off) {
                if (!v.is_number_integer()) fail(jw + ".offset must contain only integers");
                jump.offset.push_back(v.get<int>());
            }
            jump.prob = get_double(js[i], "prob", jw);
            jumps.push_back(std::move(jump));
        }
        return ExponentSpec::lattice_walk(get_double(j, "rate", where), std::move(jumps));
    }
    if (kind == "stable") {
        expect_keys(j, where, {"kind", "alpha"});
        return ExponentSpec::stable(get_double(j, "alpha", where));
    }
    if (kind == "torus_brownian") {
        expect_keys(j, where, {"kind", "kappa"});
        return ExponentSpec::torus_brownian(get_double(j, "kappa", where));
    }
    if (kind == "product") {
        expect_keys(j, where, {"kind", "components"});
        const json& c = require(j, "components", where);
        if (!c.is_array() || c.size() < 2)
            fail(where + ".components must be an array of >= 2 exponents");
        std::vector<ExponentSpec> comps;
        for (std::size_t i = 0; i < c.size(); ++i)
            comps.push_back(parse_levy(c[i], where + ".components[" + std::to_string(i) + "]"));
        return ExponentSpec::product(std::move(comps));
    }
    fail(where + ".kind '" + kind + "' is not an exponent kind");
}

GridSpec parse_grid(const json& j, const std::string& where) {
    expect_keys(j, where, {"min", "max", "points", "log"});
    GridSpec g;
    g.min = get_double(j, "min", where);
    g.max = get_double(j, "max", where);
    g.points = static_cast<int>(get_int(j, "points", where));
    if (auto it = j.find("log"); it != j.end()) {
        if (!it->is_boolean()) fail(where + ".log must be a boolean");
        g.log_spaced = it->get<bool>();
    }
    if (!(g.min > 0.0) || !(g.max > g.min) || g.points < 2)
        fail(where + " needs 0 < min < max and points >= 2");
    return g;
}

ExperimentKind parse_experiment(const std::string& s) {
    if (s == "kernel") return ExperimentKind::Kernel;
    if (s == "upsilon") return ExperimentKind::Upsilon;
    if (s == "volterra") return ExperimentKind::Volterra;
    if (s == "mc") return ExperimentKind::Mc;
    if (s == "sweep") return ExperimentKind::Sweep;
    if (s == "localtime") return ExperimentKind::LocalTime;
    if (s == "invariance") return ExperimentKind::Invariance;
    if (s == "dichotomy") return ExperimentKind::Dichotomy;
    if (s == "verify-all") return ExperimentKind::VerifyAll;
    fail("experiment '" + s + "' is not one of kernel|upsilon|volterra|mc|sweep|localtime|"
         "invariance|dichotomy|verify-all");
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }
    expect_keys(doc, "top level",
                {"schema", "experiment", "model", "group", "levy", "normalization", "sigma", "u0",
                 "t", "lambda", "beta", "numerics", "automorphism", "output"});

    ExperimentConfig cfg;
    if (get_string(doc, "schema", "top level") != std::string(kConfigSchema))
        fail(std::string("schema must be \"") + kConfigSchema + "\"");
    cfg.experiment = parse_experiment(get_string(doc, "experiment", "top level"));

    if (auto it = doc.find("model"); it != doc.end()) {
        if (!it->is_string()) fail("model must be a catalog id string");
        cfg.model_id = it->get<std::string>();
    }
    if (auto it = doc.find("group"); it != doc.end()) cfg.group = parse_group(*it, "group");
    if (auto it = doc.find("levy"); it != doc.end()) cfg.levy = parse_levy(*it, "levy");
    if (cfg.model_id && (cfg.group || cfg.levy))
        fail("give either a catalog 'model' or explicit 'group'+'levy' tables, not both");
    if (cfg.group.has_value() != cfg.levy.has_value())
        fail("'group' and 'levy' must be given together");

    if (auto it = doc.find("normalization"); it != doc.end()) {
        if (!it->is_string()) fail("normalization must be a string");
        const std::string s = it->get<std::string>();
        if (s == "default") cfg.normalization = Normalization::Default;
        else if (s == "compact_probability") cfg.normalization = Normalization::CompactProbability;
        else fail("normalization must be 'default' or 'compact_probability'");
    }

    if (auto it = doc.find("sigma"); it != doc.end()) {
        const json& s = *it;
        const std::string kind = get_string(s, "kind", "sigma");
        if (kind == "linear") {
            expect_keys(s, "sigma", {"kind", "slope"});
            const double slope = get_double(s, "slope", "sigma");
            if (!(slope > 0.0)) fail("sigma.slope must be positive");
            cfg.sigma = SigmaSpec::linear(slope);
            cfg.sigma_fn = SigmaFunction::Linear;
        } else if (kind == "affine_bounded") {
            expect_keys(s, "sigma", {"kind", "floor", "cap"});
            const double floor = get_double(s, "floor", "sigma");
            const double cap = get_double(s, "cap", "sigma");
            cfg.sigma = sigma_envelope(SigmaFunction::AffineBounded, 1.0, cap, floor);
            cfg.sigma_fn = SigmaFunction::AffineBounded;
        } else if (kind == "sin_plus_slope") {
            expect_keys(s, "sigma", {"kind", "slope"});
            const double slope = get_double(s, "slope", "sigma");
            if (!(slope > 0.0)) fail("sigma.slope must be positive");
            cfg.sigma = sigma_envelope(SigmaFunction::SinPlusSlope, slope, 0.0, 0.0);
            cfg.sigma_fn = SigmaFunction::SinPlusSlope;
        } else {
            fail("sigma.kind must be linear|affine_bounded|sin_plus_slope");
        }
    }

    if (auto it = doc.find("u0"); it != doc.end()) {
        const json& u = *it;
        const std::string kind = get_string(u, "kind", "u0");
        if (kind == "point_mass") {
            expect_keys(u, "u0", {"kind"});
            cfg.u0 = InitialData::point_mass();
        } else if (kind == "constant_one") {
            expect_keys(u, "u0", {"kind"});
            cfg.u0 = InitialData::constant_one();
        } else if (kind == "gaussian") {
            expect_keys(u, "u0", {"kind", "width"});
            const double w = get_double(u, "width", "u0");
            if (!(w > 0.0)) fail("u0.width must be positive");
            cfg.u0 = InitialData::gaussian(w);
        } else {
            fail("u0.kind must be point_mass|constant_one|gaussian");
        }
    }

    if (auto it = doc.find("t"); it != doc.end()) {
        if (!it->is_number()) fail("t must be a number");
        cfg.t = it->get<double>();
    }
    if (!(cfg.t > 0.0)) fail("t must be positive");

    if (auto it = doc.find("lambda"); it != doc.end()) {
        if (it->is_number()) {
            cfg.lambda = it->get<double>();
            if (!(*cfg.lambda >= 0.0)) fail("lambda must be nonnegative");
        } else if (it->is_object()) {
            cfg.lambda_grid = parse_grid(*it, "lambda");
        } else {
            fail("lambda must be a number or a {min,max,points,log} table");
        }
    }
    if (auto it = doc.find("beta"); it != doc.end()) cfg.beta_grid = parse_grid(*it, "beta");

    if (auto it = doc.find("numerics"); it != doc.end()) {
        const json& n = *it;
        expect_keys(n, "numerics", {"dt", "n_paths", "seed", "threads", "source"});
        if (auto f = n.find("dt"); f != n.end()) {
            if (!f->is_number()) fail("numerics.dt must be a number");
            cfg.dt = f->get<double>();
        }
        if (auto f = n.find("n_paths"); f != n.end()) {
            if (!f->is_number_integer()) fail("numerics.n_paths must be an integer");
            cfg.n_paths = f->get<long long>();
        }
        if (auto f = n.find("seed"); f != n.end()) {
            if (!f->is_number_unsigned() && !f->is_number_integer())
                fail("numerics.seed must be an integer");
            cfg.seed = f->get<std::uint64_t>();
        }
        if (auto f = n.find("threads"); f != n.end()) {
            if (!f->is_number_integer()) fail("numerics.threads must be an integer");
            cfg.threads = static_cast<int>(f->get<long long>());
        }
        if (auto f = n.find("source"); f != n.end()) {
            if (!f->is_string()) fail("numerics.source must be a string");
            const std::string s = f->get<std::string>();
            if (s == "volterra") cfg.source = SweepSource::Volterra;
            else if (s == "lower_bound") cfg.source = SweepSource::LowerBound;
            else if (s == "upper_bound") cfg.source = SweepSource::UpperBound;
            else if (s == "mc") cfg.source = SweepSource::MonteCarlo;
            else fail("numerics.source must be volterra|lower_bound|upper_bound|mc");
        }
        if (!(cfg.dt > 0.0)) fail("numerics.dt must be positive");
        if (cfg.n_paths < 1) fail("numerics.n_paths must be >= 1");
        if (cfg.threads < 0) fail("numerics.threads must be >= 0");
    }

    if (auto it = doc.find("automorphism"); it != doc.end()) {
        const json& a = *it;
        expect_keys(a, "automorphism", {"multipliers", "factor_perm"});
        const json& m = require(a, "multipliers", "automorphism");
        if (!m.is_array() || m.empty()) fail("automorphism.multipliers must be a nonempty array");
        for (const auto& v : m) {
            if (!v.is_number_integer()) fail("automorphism.multipliers must contain integers");
            cfg.automorphism.multipliers.push_back(v.get<long long>());
        }
        if (auto f = a.find("factor_perm"); f != a.end()) {
            if (!f->is_array()) fail("automorphism.factor_perm must be an array");
            for (const auto& v : *f) {
                if (!v.is_number_integer()) fail("automorphism.factor_perm must contain integers");
                cfg.automorphism.factor_perm.push_back(v.get<int>());
            }
        }
    }

    if (auto it = doc.find("output"); it != doc.end()) {
        const json& o = *it;
        expect_keys(o, "output", {"directory", "formats"});
        if (auto f = o.find("directory"); f != o.end()) {
            if (!f->is_string()) fail("output.directory must be a string");
            cfg.output_dir = f->get<std::string>();
        }
        if (auto f = o.find("formats"); f != o.end()) {
            if (!f->is_array()) fail("output.formats must be an array");
            cfg.formats.clear();
            for (const auto& v : *f) {
                if (!v.is_string()) fail("output.formats must contain strings");
                const std::string s = v.get<std::string>();
                if (s != "csv" && s != "json") fail("output.formats entries must be csv|json");
                cfg.formats.push_back(s);
            }
            if (cfg.formats.empty()) fail("output.formats must not be empty");
        }
    }

    // Per-experiment requirements that need no computation.
    const bool needs_model = cfg.experiment != ExperimentKind::Dichotomy &&
                             cfg.experiment != ExperimentKind::VerifyAll;
    if (needs_model && !cfg.model_id && !cfg.group)
        fail("experiment '" + to_string(cfg.experiment) + "' needs a 'model' or 'group'+'levy'");
    if ((cfg.experiment == ExperimentKind::Volterra || cfg.experiment == ExperimentKind::Mc) &&
        !cfg.lambda)
        fail("experiment '" + to_string(cfg.experiment) + "' needs a scalar lambda");
    if (cfg.experiment == ExperimentKind::Sweep && !cfg.lambda_grid)
        fail("experiment 'sweep' needs a lambda {min,max,points,log} table");
    if (cfg.experiment == ExperimentKind::Upsilon && !cfg.beta_grid)
        fail("experiment 'upsilon' needs a beta {min,max,points,log} table");
    if (cfg.experiment == ExperimentKind::Invariance && cfg.automorphism.multipliers.empty())
        fail("experiment 'invariance' needs an automorphism table");

    cfg.canonical = doc.dump();
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string schema_text() {
    return R"(she/1 experiment config (JSON, strict: unknown keys are errors)

{
  "schema": "she/1",                      // required, exactly this string
  "experiment": "sweep",                  // kernel|upsilon|volterra|mc|sweep|
                                          // localtime|invariance|dichotomy|verify-all
  "model": "cyclic2",                     // catalog id, OR give group+levy:
  "group": {                              // trivial        {}
    "kind": "cyclic", "n": 2              // cyclic         {n}
  },                                      // lattice        {dim, delta, radius}
                                          // torus          {resolution}
                                          // real_line      {halfwidth, resolution}
                                          // product        {factors: [group, ...]}
  "levy": {                               // zero           {}
    "kind": "cyclic_rates",               // cyclic_rates   {rates: [r1..r_{n-1}]}
    "rates": [1.0]                        // lattice_walk   {rate, jumps: [{offset, prob}]}
  },                                      // stable         {alpha in (0,2]}
                                          // torus_brownian {kappa > 0}
                                          // product        {components: [levy, ...]}
  "normalization": "default",             // or "compact_probability"
  "sigma": {"kind": "linear", "slope": 1.0},
                                          // affine_bounded {floor, cap}
                                          // sin_plus_slope {slope}
  "u0": {"kind": "point_mass"},           // point_mass | constant_one | gaussian {width}
  "t": 1.0,
  "lambda": 1.0,                          // scalar (volterra, mc)
                                          // or {min, max, points, log} (sweep)
  "beta": {"min": 0.1, "max": 10.0, "points": 20, "log": true},   // upsilon only
  "numerics": {
    "dt": 1e-3, "n_paths": 1000, "seed": 271828, "threads": 0,
    "source": "volterra"                  // sweep engine: volterra|lower_bound|upper_bound|mc
  },
  "automorphism": {"multipliers": [2]},   // invariance only; optional "factor_perm"
  "output": {"directory": "out", "formats": ["csv", "json"]}
}

Catalog ids: trivial, cyclic2, cyclic3, cyclic5, cyclic6, lattice1d,
product_c2_c3, torus, torus9, stable2, stable15, stable125,
product_stable2_torus.

Exit codes: 0 success; 1 a verification check reported ok=false;
2 configuration error; 3 numeric failure (divergent transform, unstable
simulation, unresolved grid).

Environment: SHE_OUTPUT_DIR overrides output.directory.
)";
}

} // namespace she::app
