#include "she/app/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "she/app/verify.hpp"
#include "she/bounds.hpp"
#include "she/catalog.hpp"
#include "she/errors.hpp"
#include "she/excitation.hpp"
#include "she/simulate.hpp"
#include "she/spectral.hpp"
#include "she/volterra.hpp"

namespace she::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Emitter {
    fs::path dir;
    bool want_csv = true;
    bool want_json = true;
    std::vector<std::string> files;

    void write_file(const std::string& name, const std::string& body) {
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + p.string());
        out << body;
        if (!out) throw ConfigError("write failed for " + p.string());
        files.push_back(name);
    }

    void csv(const std::string& name, const std::string& header,
             const std::vector<std::vector<double>>& rows) {
        if (!want_csv) return;
        std::ostringstream os;
        os << header << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << fmt17(row[i]);
            os << "\n";
        }
        write_file(name, os.str());
    }

    void jsonfile(const std::string& name, const json& j, bool always = false) {
        if (!want_json && !always) return;
        write_file(name, j.dump(2) + "\n");
    }
};

struct Resolved {
    LevyModel model;
    InitialData u0;
};

LevyModel build_model(const ExperimentConfig& cfg) {
    if (cfg.model_id) {
        const CatalogEntry& e = catalog_entry(*cfg.model_id);
        return LevyModel(e.group, e.exponent, cfg.normalization);
    }
    return LevyModel(*cfg.group, *cfg.levy, cfg.normalization);
}

InitialData resolve_u0(const ExperimentConfig& cfg, const LevyModel& model) {
    if (cfg.u0) return *cfg.u0;
    if (cfg.model_id) return catalog_entry(*cfg.model_id).u0;
    if (model.group().discrete()) return InitialData::point_mass();
    if (model.group().compact()) return InitialData::constant_one();
    throw ConfigError("u0 is required for a noncompact continuum group");
}

Resolved resolve_model(const ExperimentConfig& cfg) {
    LevyModel model = build_model(cfg);
    InitialData u0 = resolve_u0(cfg, model);
    return {std::move(model), std::move(u0)};
}

SimConfig sim_config(const ExperimentConfig& cfg, const Resolved& rm) {
    SimConfig sc;
    sc.lambda = cfg.lambda.value_or(1.0);
    sc.t_end = cfg.t;
    sc.dt = cfg.dt;
    sc.n_paths = cfg.n_paths;
    sc.seed = cfg.seed;
    sc.threads = cfg.threads;
    sc.sigma_fn = cfg.sigma_fn;
    sc.sigma = cfg.sigma;
    sc.u0 = rm.u0;
    return sc;
}

Isomorphism build_automorphism(const Group& g, const AutomorphismSpec& spec) {
    Isomorphism base = spec.factor_perm.empty()
                           ? identity_isomorphism(g.spec())
                           : make_factor_permutation(g.spec(), spec.factor_perm);
    if (spec.multipliers.size() == 1)
        return compose(make_multiplier_automorphism(base.target, spec.multipliers[0]), base);
    Isomorphism mult = identity_isomorphism(base.target);
    if (spec.multipliers.size() != mult.multiplier.size())
        throw ConfigError("automorphism.multipliers must have one entry per axis (" +
                          std::to_string(mult.multiplier.size()) + ")");
    const Group target(base.target);
    for (std::size_t i = 0; i < spec.multipliers.size(); ++i) {
        const Axis& ax = target.axes()[i];
        const long long a = spec.multipliers[i];
        if (ax.kind == AxisKind::RealLine) {
            if (a != 1) throw ConfigError("use scale isomorphisms for real-line axes");
        } else {
            const long long r = ((a % ax.m) + ax.m) % ax.m;
            if (std::gcd(r, static_cast<long long>(ax.m)) != 1)
                throw ConfigError("automorphism multiplier " + std::to_string(a) +
                                  " is not a unit modulo " + std::to_string(ax.m));
        }
        mult.multiplier[i] = a;
    }
    return compose(mult, base);
}

// --- experiment bodies -----------------------------------------------------

void run_kernel(const ExperimentConfig& cfg, Emitter& em, std::ostringstream& sum) {
    const LevyModel model = build_model(cfg); // the kernel needs no initial data
    const Group& g = model.group();
    const std::vector<double> p = heat_kernel(model, cfg.t);

    std::ostringstream header;
    for (std::size_t a = 0; a < g.axes().size(); ++a) header << "x" << a << ",";
    header << "p";
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < g.size(); ++s) {
        std::vector<double> row = g.coords(s);
        row.push_back(p[s]);
        rows.push_back(std::move(row));
    }
    em.csv("kernel.csv", header.str(), rows);
    if (em.want_json) {
        json j;
        j["t"] = cfg.t;
        j["p"] = p;
        em.jsonfile("kernel.json", j);
    }
    double mass = 0.0;
    for (double v : p) mass += v;
    mass *= g.haar_weight();
    sum << "kernel at t=" << fmt6(cfg.t) << ": " << p.size() << " sites, mass " << fmt6(mass)
        << "\n";
}

void run_upsilon(const ExperimentConfig& cfg, Emitter& em, std::ostringstream& sum) {
    const LevyModel model = build_model(cfg); // Upsilon needs no initial data
    const std::vector<double> grid = cfg.beta_grid->materialize();
    std::vector<std::vector<double>> rows;
    for (double beta : grid) rows.push_back({beta, upsilon(model, beta)});
    em.csv("upsilon.csv", "beta,upsilon", rows);
    if (em.want_json) {
        json j;
        j["beta"] = json::array();
        j["upsilon"] = json::array();
        for (const auto& r : rows) {
            j["beta"].push_back(r[0]);
            j["upsilon"].push_back(r[1]);
        }
        em.jsonfile("upsilon.json", j);
    }
    sum << "upsilon on [" << fmt6(grid.front()) << ", " << fmt6(grid.back()) << "]: "
        << fmt6(rows.front()[1]) << " .. " << fmt6(rows.back()[1]) << "\n";
}

void run_volterra(const ExperimentConfig& cfg, Emitter& em, std::ostringstream& sum) {
    // existence first: on a Dalang-failing model no initial data can help,
    // so refuse (numeric failure) before complaining about a missing u0
    const LevyModel model = build_model(cfg);
    if (!model.group().discrete() && !dalang_ok(model))
        throw NumericError(NumericError::Kind::NonFinite,
                           "Dalang condition fails: the second moment is infinite "
                           "at every positive time for this model");
    const InitialData u0 = resolve_u0(cfg, model);
    std::vector<double> t_grid;
    for (int i = 1; i <= 64; ++i) t_grid.push_back(cfg.t * i / 64.0);
    const EnergyCurve curve = solve_volterra(model, u0, cfg.sigma, *cfg.lambda, t_grid);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < curve.t_grid.size(); ++i)
        rows.push_back({curve.t_grid[i], curve.log_energy_sq[i]});
    em.csv("energy.csv", "t,log_energy_sq", rows);
    if (em.want_json) {
        json j;
        j["lambda"] = curve.lambda;
        j["t"] = curve.t_grid;
        j["log_energy_sq"] = curve.log_energy_sq;
        em.jsonfile("energy.json", j);
    }
    sum << "volterra lambda=" << fmt6(*cfg.lambda) << ": log E^2(t=" << fmt6(cfg.t) << ") = "
        << fmt6(curve.log_energy_sq.back()) << "\n";
}

void run_mc(const ExperimentConfig& cfg, Emitter& em, std::ostringstream& sum) {
    const Resolved rm = resolve_model(cfg);
    const SimConfig sc = sim_config(cfg, rm);
    const McEstimate est = rm.model.group().discrete() ? simulate_energy(rm.model, sc)
                                                       : simulate_grid(rm.model, sc);
    json j;
    j["mean"] = est.mean;
    j["se"] = est.se;
    j["n_paths"] = est.n_paths;
    j["seed"] = est.seed;
    j["dt_eff"] = est.dt_eff;
    j["steps"] = est.steps;
    j["lambda"] = sc.lambda;
    j["t"] = sc.t_end;
    em.jsonfile("mc.json", j, /*always=*/true);
    sum << "mc lambda=" << fmt6(sc.lambda) << ": E||u||^2 = " << fmt6(est.mean) << " +- "
        << fmt6(est.se) << " (" << est.n_paths << " paths)\n";
}

void run_sweep(const ExperimentConfig& cfg, Emitter& em, std::ostringstream& sum) {
    const Resolved rm = resolve_model(cfg);
    const std::vector<double> grid = cfg.lambda_grid->materialize();
    const SimConfig sc = sim_config(cfg, rm);
    const LambdaSweep sw = sweep(rm.model, rm.u0, cfg.sigma, cfg.t, grid, cfg.source,
                                 cfg.source == SweepSource::MonteCarlo ? &sc : nullptr);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < sw.lambdas.size(); ++i)
        rows.push_back({sw.lambdas[i], sw.log_energy_sq[i], sw.log_log_energy[i]});
    em.csv("sweep.csv", "lambda,log_energy_sq,log_log_energy", rows);
    if (em.want_json) {
        json j;
        j["source"] = to_string(sw.source);
        j["t"] = sw.t;
        j["lambda"] = sw.lambdas;
        j["log_energy_sq"] = sw.log_energy_sq;
        j["log_log_energy"] = sw.log_log_energy;
        std::vector<bool> valid(sw.valid.begin(), sw.valid.end());
        j["valid"] = valid;
        em.jsonfile("sweep.json", j);
    }
    sum << "sweep (" << to_string(sw.source) << ") over [" << fmt6(grid.front()) << ", "
        << fmt6(grid.back()) << "]";
    try {
        const IndexEstimate est = fit_index(sw, 0.5);
        sum << ": fitted index " << fmt6(est.slope) << " +- " << fmt6(est.ci_halfwidth);
    } catch (const NumericError&) {
        sum << ": too few usable points for an index fit";
    }
    sum << "\n";
}

int run_localtime(const ExperimentConfig& cfg, Emitter& em, std::ostringstream& sum) {
    const Resolved rm = resolve_model(cfg);
    const LocalTimeReport rep = local_time_identity(rm.model, cfg.n_paths, cfg.seed);
    json j;
    j["lhs"] = rep.lhs;
    j["se"] = rep.se;
    j["rhs"] = rep.rhs;
    j["rhs_two_upsilon1"] = rep.rhs_two_upsilon1;
    j["constant_mismatch"] = rep.constant_mismatch;
    j["ok"] = rep.ok;
    j["n_paths"] = cfg.n_paths;
    j["seed"] = cfg.seed;
    em.jsonfile("localtime.json", j, /*always=*/true);
    sum << "local time: lhs " << fmt6(rep.lhs) << " +- " << fmt6(rep.se) << ", rhs "
        << fmt6(rep.rhs) << " -> " << (rep.ok ? "ok" : "NOT ok") << "\n";
    return rep.ok ? 0 : 1;
}

int run_invariance(const ExperimentConfig& cfg, Emitter& em, std::ostringstream& sum) {
    const Resolved rm = resolve_model(cfg);
    const Isomorphism h = build_automorphism(rm.model.group(), cfg.automorphism);
    const SimConfig sc = sim_config(cfg, rm);
    const InvarianceReport rep = invariance_check(rm.model, sc, h);
    json j;
    j["max_abs_path_diff"] = rep.max_abs_path_diff;
    j["kernel_pushforward_error"] = rep.kernel_pushforward_error;
    j["ok"] = rep.ok;
    em.jsonfile("invariance.json", j, /*always=*/true);
    sum << "invariance: path diff " << fmt6(rep.max_abs_path_diff) << ", kernel pushforward "
        << fmt6(rep.kernel_pushforward_error) << " -> " << (rep.ok ? "ok" : "NOT ok") << "\n";
    return rep.ok ? 0 : 1;
}

int run_dichotomy(const ExperimentConfig& cfg, Emitter& em, std::ostringstream& sum) {
    const std::vector<DichotomyRow> rows = dichotomy_report(dichotomy_cases(), cfg.t);

    std::ostringstream csv;
    csv << "model_id,kind,source,slope,ci,predicted,verdict\n";
    json jrows = json::array();
    bool all = true;
    for (const DichotomyRow& row : rows) {
        const std::string kind = row.discrete ? "discrete" : "connected";
        csv << row.id << "," << kind << "," << to_string(row.source) << "," << fmt17(row.slope)
            << "," << fmt17(row.ci_halfwidth) << ","
            << (row.predicted ? fmt17(*row.predicted) : std::string()) << ","
            << (row.pass ? "pass" : "fail") << "\n";
        json j;
        j["model_id"] = row.id;
        j["kind"] = kind;
        j["source"] = to_string(row.source);
        j["slope"] = row.slope;
        j["ci"] = row.ci_halfwidth;
        if (row.predicted) j["predicted"] = *row.predicted;
        else j["predicted"] = nullptr;
        j["verdict"] = row.pass ? "pass" : "fail";
        j["regime"] = to_string(row.verdict);
        jrows.push_back(std::move(j));
        all = all && row.pass;
        sum << "  " << row.id << " (" << kind << ", " << to_string(row.source)
            << "): slope " << fmt6(row.slope) << " +- " << fmt6(row.ci_halfwidth);
        if (row.predicted) sum << ", predicted " << fmt6(*row.predicted);
        sum << " -> " << (row.pass ? "pass" : "FAIL") << "\n";
    }
    if (em.want_csv) em.write_file("dichotomy.csv", csv.str());
    em.jsonfile("dichotomy.json", json{{"rows", jrows}}, /*always=*/true);
    sum << (all ? "dichotomy: all models pass" : "dichotomy: some models FAIL") << "\n";
    return all ? 0 : 1;
}

int run_verify_all(Emitter& em, std::ostringstream& sum) {
    const std::vector<CheckResult> results = run_acceptance_checks();
    json jrows = json::array();
    bool all = true;
    for (const CheckResult& r : results) {
        json j;
        j["number"] = r.number;
        j["name"] = r.name;
        j["pass"] = r.pass;
        j["detail"] = r.detail;
        j["seconds"] = r.seconds;
        jrows.push_back(std::move(j));
        all = all && r.pass;
    }
    em.jsonfile("verify.json", json{{"checks", jrows}}, /*always=*/true);
    sum << format_check_table(results);
    return all ? 0 : 1;
}

} // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();

    Emitter em;
    const char* env_dir = std::getenv("SHE_OUTPUT_DIR");
    em.dir = env_dir && *env_dir ? fs::path(env_dir) : fs::path(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(em.dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + em.dir.string());
    em.want_csv = false;
    em.want_json = false;
    for (const std::string& f : cfg.formats) {
        if (f == "csv") em.want_csv = true;
        if (f == "json") em.want_json = true;
    }

    RunResult res;
    std::ostringstream sum;
    switch (cfg.experiment) {
    case ExperimentKind::Kernel: run_kernel(cfg, em, sum); break;
    case ExperimentKind::Upsilon: run_upsilon(cfg, em, sum); break;
    case ExperimentKind::Volterra: run_volterra(cfg, em, sum); break;
    case ExperimentKind::Mc: run_mc(cfg, em, sum); break;
    case ExperimentKind::Sweep: run_sweep(cfg, em, sum); break;
    case ExperimentKind::LocalTime: res.exit_code = run_localtime(cfg, em, sum); break;
    case ExperimentKind::Invariance: res.exit_code = run_invariance(cfg, em, sum); break;
    case ExperimentKind::Dichotomy: res.exit_code = run_dichotomy(cfg, em, sum); break;
    case ExperimentKind::VerifyAll: res.exit_code = run_verify_all(em, sum); break;
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest;
    manifest["schema"] = kConfigSchema;
    manifest["tool_version"] = kVersion;
    manifest["config"] = json::parse(cfg.canonical);
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a(cfg.canonical)));
    manifest["config_hash_fnv1a"] = hash;
    manifest["outputs"] = em.files;
    manifest["wall_seconds"] = wall;
    em.write_file("manifest.json", manifest.dump(2) + "\n");

    res.files = em.files;
    res.summary = sum.str();
    return res;
}

} // namespace she::app
