#include "she/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "she/errors.hpp"
#include "she/logsum.hpp"
#include "she/rng.hpp"
#include "she/spectral.hpp"

namespace she {

namespace {

struct StepPlan {
    long long steps = 0;
    double dt_eff = 0.0;
};

StepPlan plan_steps(double t_end, double dt) {
    if (!(t_end > 0.0) || !(dt > 0.0))
        throw ConfigError("simulation needs t_end > 0 and dt > 0");
    StepPlan p;
    p.steps = std::max(1ll, std::llround(t_end / dt));
    p.dt_eff = t_end / static_cast<double>(p.steps);
    return p;
}

// Spectral propagator row over offsets: p_dt(z) * w_x.  This is the exact
// semigroup of the grid model (truncated dual), the same object the Volterra
// kernel integrates, so the two moment routes agree up to time discretization.
std::vector<double> propagator_row(const LevyModel& model, double dt) {
    const Group& g = model.group();
    const std::size_t m = g.size();
    std::vector<std::complex<double>> damp(m);
    for (std::size_t k = 0; k < m; ++k)
        damp[k] = g.dual_weight() * std::exp(-dt * model.psi(k));
    std::vector<double> wp(m);
    for (std::size_t z = 0; z < m; ++z) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) acc += damp[k] * g.pairing(z, k);
        wp[z] = acc.real() * g.haar_weight();
    }
    return wp;
}

std::vector<std::uint32_t> add_table(const Group& g) {
    const std::size_t m = g.size();
    std::vector<std::uint32_t> tab(m * m);
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t z = 0; z < m; ++z)
            tab[x * m + z] = static_cast<std::uint32_t>(g.add(x, z));
    return tab;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void guard_lambda(const LevyModel& model, const SimConfig& cfg) {
    if (cfg.lambda == 0.0) return;
    if (cfg.sigma.kind == SigmaSpec::Kind::Bounded) {
        // bounded noise coefficient: energy grows at most linearly in t
        const double log_growth = 2.0 * std::log(cfg.lambda * cfg.sigma.cap) +
                                  std::log(model.group().total_mass() * cfg.t_end);
        if (log_growth > 600.0)
            throw ConfigError("lambda too large for direct simulation with bounded sigma");
        return;
    }
    const double L = cfg.sigma.L();
    if (L <= 0.0) return;
    // exponential-regime refusal: bound the growth rate by the root of
    // Upsilon(beta) = 1/(4 lambda^2 L^2) on the truncated dual
    const double y = 1.0 / (4.0 * cfg.lambda * cfg.lambda * L * L);
    double lo = 1e-12, hi = 1e12;
    if (y >= upsilon_truncated(model, lo)) return; // growth rate effectively zero
    double rate = hi;
    if (y > upsilon_truncated(model, hi)) {
        for (int i = 0; i < 120; ++i) {
            const double mid = std::sqrt(lo * hi);
            (upsilon_truncated(model, mid) >= y ? lo : hi) = mid;
        }
        rate = std::sqrt(lo * hi);
    }
    const double predicted = u0_log_norm_sq(cfg.u0, model.group()) + 0.5 * rate * cfg.t_end + 3.0;
    if (predicted > 600.0)
        throw ConfigError("lambda too large for direct simulation: predicted log energy " +
                          std::to_string(predicted) +
                          " overflows doubles; use the moment solver or the analytic bounds");
}

McEstimate run_mc(const LevyModel& model, const SimConfig& cfg) {
    const Group& g = model.group();
    if (cfg.n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (!(cfg.noise_scale > 0.0)) throw ConfigError("noise_scale must be positive");
    guard_lambda(model, cfg);

    const StepPlan plan = plan_steps(cfg.t_end, cfg.dt);
    const std::vector<double> wp = propagator_row(model, plan.dt_eff);
    const std::vector<std::uint32_t> tab = add_table(g);
    const std::vector<double> field0 = u0_field(cfg.u0, g);
    const std::size_t m = g.size();
    const double noise_std = std::sqrt(plan.dt_eff / g.haar_weight());
    const double amp = cfg.lambda * cfg.noise_scale;
    const double wx = g.haar_weight();

    std::vector<double> energies(static_cast<std::size_t>(cfg.n_paths));
    std::atomic<bool> unstable{false};

    auto run_range = [&](long long begin, long long end) {
        std::vector<double> u(m), v(m);
        for (long long p = begin; p < end && !unstable.load(std::memory_order_relaxed); ++p) {
            std::copy(field0.begin(), field0.end(), u.begin());
            for (long long k = 0; k < plan.steps; ++k) {
                for (std::size_t x = 0; x < m; ++x) {
                    double acc = 0.0;
                    const std::uint32_t* row = &tab[x * m];
                    for (std::size_t z = 0; z < m; ++z) acc += wp[z] * u[row[z]];
                    v[x] = acc;
                }
                double amax = 0.0;
                for (std::size_t x = 0; x < m; ++x) {
                    const double dB =
                        noise_std * rng::normal(cfg.seed, static_cast<std::uint64_t>(p),
                                                static_cast<std::uint64_t>(k), x);
                    v[x] += amp * sigma_eval(cfg.sigma_fn, cfg.sigma, u[x]) * dB;
                    amax = std::max(amax, std::abs(v[x]));
                }
                if (amax > 1e150) {
                    unstable.store(true, std::memory_order_relaxed);
                    break;
                }
                std::swap(u, v);
            }
            double e = 0.0;
            for (std::size_t x = 0; x < m; ++x) e += u[x] * u[x];
            energies[static_cast<std::size_t>(p)] = e * wx;
        }
    };

    const int nthreads =
        static_cast<int>(std::min<long long>(resolve_threads(cfg.threads), cfg.n_paths));
    if (nthreads <= 1) {
        run_range(0, cfg.n_paths);
    } else {
        std::vector<std::thread> pool;
        const long long chunk = (cfg.n_paths + nthreads - 1) / nthreads;
        for (int ti = 0; ti < nthreads; ++ti) {
            const long long b = ti * chunk;
            const long long e = std::min<long long>(b + chunk, cfg.n_paths);
            if (b >= e) break;
            pool.emplace_back(run_range, b, e);
        }
        for (auto& th : pool) th.join();
    }
    if (unstable.load())
        throw NumericError(NumericError::Kind::Unstable,
                           "simulated field overflowed 1e150; decrease lambda or t_end");

    // index-ordered reductions: identical results for any thread count
    logdom::NeumaierSum sum;
    for (double e : energies) sum.add(e);
    const double mean = sum.value() / static_cast<double>(cfg.n_paths);
    double se = 0.0;
    if (cfg.n_paths > 1) {
        logdom::NeumaierSum var;
        for (double e : energies) var.add((e - mean) * (e - mean));
        se = std::sqrt(var.value() /
                       (static_cast<double>(cfg.n_paths) * static_cast<double>(cfg.n_paths - 1)));
    }

    McEstimate est;
    est.mean = mean;
    est.se = se;
    est.n_paths = cfg.n_paths;
    est.seed = cfg.seed;
    est.dt_eff = plan.dt_eff;
    est.steps = plan.steps;
    return est;
}

} // namespace

McEstimate simulate_energy(const LevyModel& model, const SimConfig& cfg) {
    const Group& g = model.group();
    if (!g.finite() || !g.discrete())
        throw ConfigError("simulate_energy needs a finite discrete group; "
                          "use simulate_grid for Torus/RealLine grids");
    const StepPlan plan = plan_steps(cfg.t_end, cfg.dt);
    if (plan.dt_eff * model.total_jump_rate() > 0.1)
        throw ConfigError("dt too coarse: need dt * total jump rate <= 0.1");
    return run_mc(model, cfg);
}

McEstimate simulate_grid(const LevyModel& model, const SimConfig& cfg) {
    const Group& g = model.group();
    if (g.discrete())
        throw ConfigError("simulate_grid is for Torus/RealLine grids; "
                          "use simulate_energy on discrete groups");
    const StepPlan plan = plan_steps(cfg.t_end, cfg.dt);
    if (plan.dt_eff * model.max_re_psi() > 0.5)
        throw ConfigError("dt too coarse for the grid spectrum: need dt * max Re Psi <= 0.5");
    return run_mc(model, cfg);
}

LocalTimeReport local_time_identity(const LevyModel& model, long long n_paths, std::uint64_t seed) {
    const Group& g = model.group();
    if (!g.finite() || !g.discrete())
        throw ConfigError("local_time_identity needs a finite discrete group");
    if (n_paths < 1) throw ConfigError("n_paths must be >= 1");

    const std::size_t m = g.size();

    // Jump rates of the driving walk by offset site, then symmetrized.
    std::vector<double> rate(m, 0.0);
    const auto& axes = g.axes();
    std::vector<int> id_digits(axes.size());
    g.decompose(g.identity(), id_digits);
    std::vector<int> digits(axes.size());
    for (const auto& leaf : model.leaves()) {
        switch (leaf.exponent_kind) {
        case ExponentKind::Zero:
            break;
        case ExponentKind::CyclicRates: {
            const std::size_t a = leaf.axis_begin;
            for (int j = 1; j < axes[a].m; ++j) {
                digits = id_digits;
                digits[a] = static_cast<int>((id_digits[a] + j) % axes[a].m);
                rate[g.compose(digits)] += leaf.espec.rates[static_cast<std::size_t>(j - 1)];
            }
            break;
        }
        case ExponentKind::LatticeWalk: {
            for (const auto& jump : leaf.espec.jumps) {
                digits = id_digits;
                for (std::size_t d = 0; d < jump.offset.size(); ++d) {
                    const Axis& ax = axes[leaf.axis_begin + d];
                    long long idx = id_digits[leaf.axis_begin + d] + jump.offset[d];
                    idx = ((idx % ax.m) + ax.m) % ax.m; // truncated lattice wraps
                    digits[leaf.axis_begin + d] = static_cast<int>(idx);
                }
                rate[g.compose(digits)] += leaf.espec.rate * jump.prob;
            }
            break;
        }
        default:
            throw ConfigError("local_time_identity supports only discrete jump exponents");
        }
    }
    std::vector<double> rs(m, 0.0);
    for (std::size_t z = 0; z < m; ++z)
        if (z != g.identity()) rs[z] = rate[z] + rate[g.neg(z)];
    double R = 0.0;
    for (double r : rs) R += r;
    std::vector<double> cum(m, 0.0);
    {
        double c = 0.0;
        for (std::size_t z = 0; z < m; ++z) {
            c += rs[z];
            cum[z] = c;
        }
    }

    const double wx = g.haar_weight();
    std::vector<double> energies(static_cast<std::size_t>(n_paths));
    std::vector<double> occ(m);
    for (long long p = 0; p < n_paths; ++p) {
        std::fill(occ.begin(), occ.end(), 0.0);
        std::size_t site = g.identity();
        double decay = 1.0; // e^{-2t}
        std::uint64_t ctr = 0;
        while (true) {
            if (R == 0.0 || decay < 1e-18) {
                occ[site] += decay;
                break;
            }
            const double hold = -std::log(rng::uniform_pos(seed, static_cast<std::uint64_t>(p), ctr++)) / R;
            const double decay_next = decay * std::exp(-2.0 * hold);
            occ[site] += decay - decay_next;
            decay = decay_next;
            const double pick = rng::uniform_pos(seed, static_cast<std::uint64_t>(p), ctr++) * R;
            const std::size_t z = static_cast<std::size_t>(
                std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin());
            site = g.add(site, std::min(z, m - 1));
        }
        double e = 0.0;
        for (std::size_t x = 0; x < m; ++x) e += occ[x] * occ[x];
        energies[static_cast<std::size_t>(p)] = e * wx;
    }

    logdom::NeumaierSum sum;
    for (double e : energies) sum.add(e);
    const double mean = sum.value() / static_cast<double>(n_paths);
    double se = 0.0;
    if (n_paths > 1) {
        logdom::NeumaierSum var;
        for (double e : energies) var.add((e - mean) * (e - mean));
        se = std::sqrt(var.value() / (static_cast<double>(n_paths) * static_cast<double>(n_paths - 1)));
    }

    LocalTimeReport rep;
    rep.lhs = mean;
    rep.se = se;
    const double wxi = g.dual_weight();
    double rhs = 0.0;
    for (std::size_t k = 0; k < m; ++k) rhs += wxi / (1.0 + model.re_psi(k));
    rep.rhs = rhs;
    rep.rhs_two_upsilon1 = 2.0 * upsilon_truncated(model, 1.0);
    rep.constant_mismatch = std::abs(rep.rhs_two_upsilon1 - rhs) > 1e-12 * std::max(1.0, rhs);
    rep.ok = std::abs(mean - rhs) <= std::max(3.0 * se, 1e-12);
    return rep;
}

InvarianceReport invariance_check(const LevyModel& model, const SimConfig& cfg,
                                  const Isomorphism& h) {
    const Group& g = model.group();
    if (!g.finite() || !g.discrete())
        throw ConfigError("invariance_check needs a finite discrete group");
    if (!structurally_equal(h.source, g.spec()) || !structurally_equal(h.target, g.spec()))
        throw ConfigError("the map is not an automorphism of this group");
    if (std::abs(modulus(h) - 1.0) > 1e-12)
        throw ConfigError("invariance_check needs a modulus-one automorphism");

    const std::size_t m = g.size();
    const Isomorphism hinv = inverse(h);
    std::vector<std::size_t> fwd(m), bwd(m);
    for (std::size_t x = 0; x < m; ++x) {
        fwd[x] = apply(h, g, x);
        bwd[x] = apply(hinv, g, x);
    }

    // Transported exponent: push every leaf's jump structure through h.
    auto n_axes = [](auto&& self, const GroupSpec& gs) -> std::size_t {
        switch (gs.kind) {
        case GroupKind::Trivial: return 0;
        case GroupKind::Lattice: return static_cast<std::size_t>(gs.dim);
        case GroupKind::Product: {
            std::size_t n = 0;
            for (const auto& f : gs.factors) n += self(self, f);
            return n;
        }
        default: return 1;
        }
    };
    std::size_t axis_cursor = 0;
    auto transport = [&](auto&& self, const GroupSpec& gs, const ExponentSpec& es) -> ExponentSpec {
        if (gs.kind == GroupKind::Product && es.kind == ExponentKind::ProductIndependent) {
            // apply the factor permutation: component i moves to factor_perm[i]
            std::vector<ExponentSpec> comps(es.components.size());
            for (std::size_t i = 0; i < gs.factors.size(); ++i)
                comps[static_cast<std::size_t>(h.factor_perm.empty() ? i : h.factor_perm[i])] =
                    self(self, gs.factors[i], es.components[i]);
            return ExponentSpec::product(std::move(comps));
        }
        const std::size_t a0 = axis_cursor;
        switch (es.kind) {
        case ExponentKind::Zero:
            axis_cursor += n_axes(n_axes, gs);
            return es;
        case ExponentKind::CyclicRates: {
            const long long n = gs.n;
            const long long mult = h.multiplier[a0];
            std::vector<double> out(static_cast<std::size_t>(n - 1), 0.0);
            for (long long j = 1; j < n; ++j) {
                const long long img = ((mult * j) % n + n) % n;
                out[static_cast<std::size_t>(img - 1)] += es.rates[static_cast<std::size_t>(j - 1)];
            }
            axis_cursor += 1;
            return ExponentSpec::cyclic_rates(std::move(out));
        }
        case ExponentKind::LatticeWalk: {
            std::vector<LatticeJump> jumps = es.jumps;
            for (auto& jump : jumps)
                for (std::size_t d = 0; d < jump.offset.size(); ++d)
                    jump.offset[d] = static_cast<int>(h.multiplier[a0 + d]) * jump.offset[d];
            axis_cursor += static_cast<std::size_t>(gs.dim);
            return ExponentSpec::lattice_walk(es.rate, std::move(jumps));
        }
        default:
            throw ConfigError("invariance_check supports only discrete jump exponents");
        }
    };
    const ExponentSpec especB = transport(transport, g.spec(), model.exponent());
    LevyModel modelB(g.spec(), especB, model.normalization());

    const StepPlan plan = plan_steps(cfg.t_end, cfg.dt);
    if (plan.dt_eff * model.total_jump_rate() > 0.1)
        throw ConfigError("dt too coarse: need dt * total jump rate <= 0.1");

    // Independent numeric check that the transported generator matches:
    // p_B(h(z)) must equal p_A(z).
    const std::vector<double> pA = heat_kernel(model, plan.dt_eff);
    const std::vector<double> pB = heat_kernel(modelB, plan.dt_eff);
    double kernel_err = 0.0;
    for (std::size_t z = 0; z < m; ++z)
        kernel_err = std::max(kernel_err, std::abs(pB[fwd[z]] - pA[z]));

    const double wx = g.haar_weight();
    std::vector<double> wpA(m);
    for (std::size_t z = 0; z < m; ++z) wpA[z] = pA[z] * wx;

    const std::vector<std::uint32_t> tab = add_table(g);
    const std::vector<double> f0 = u0_field(cfg.u0, g);
    std::vector<double> f0B(m);
    for (std::size_t x = 0; x < m; ++x) f0B[x] = f0[bwd[x]];

    const double noise_std = std::sqrt(plan.dt_eff / wx);
    const double amp = cfg.lambda * cfg.noise_scale;

    double max_diff = 0.0;
    std::vector<double> uA(m), vA(m), uB(m), vB(m);
    for (long long p = 0; p < cfg.n_paths; ++p) {
        uA = f0;
        uB = f0B;
        for (long long k = 0; k < plan.steps; ++k) {
            for (std::size_t x = 0; x < m; ++x) {
                double acc = 0.0;
                const std::uint32_t* row = &tab[x * m];
                for (std::size_t z = 0; z < m; ++z) acc += wpA[z] * uA[row[z]];
                vA[x] = acc + amp * sigma_eval(cfg.sigma_fn, cfg.sigma, uA[x]) *
                                  (noise_std * rng::normal(cfg.seed, static_cast<std::uint64_t>(p),
                                                           static_cast<std::uint64_t>(k), x));
            }
            for (std::size_t x = 0; x < m; ++x) {
                double acc = 0.0;
                const std::uint32_t* row = &tab[x * m];
                for (std::size_t z = 0; z < m; ++z) acc += wpA[z] * uB[row[fwd[z]]];
                vB[x] = acc + amp * sigma_eval(cfg.sigma_fn, cfg.sigma, uB[x]) *
                                  (noise_std * rng::normal(cfg.seed, static_cast<std::uint64_t>(p),
                                                           static_cast<std::uint64_t>(k), bwd[x]));
            }
            std::swap(uA, vA);
            std::swap(uB, vB);
            for (std::size_t x = 0; x < m; ++x)
                max_diff = std::max(max_diff, std::abs(uB[x] - uA[bwd[x]]));
        }
    }

    InvarianceReport rep;
    rep.max_abs_path_diff = max_diff;
    rep.kernel_pushforward_error = kernel_err;
    rep.ok = max_diff <= 1e-10 && kernel_err <= 1e-11;
    return rep;
}

} // namespace she
