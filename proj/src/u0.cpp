#include "she/u0.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "she/errors.hpp"
#include "she/logsum.hpp"

namespace she {

namespace {

void validate(const InitialData& u0, const Group& g) {
    switch (u0.kind) {
    case InitialData::Kind::PointMass:
        if (!g.discrete())
            throw ConfigError("PointMass initial data needs a discrete group");
        return;
    case InitialData::Kind::ConstantOne:
        if (!g.compact())
            throw ConfigError("ConstantOne initial data needs a compact group");
        return;
    case InitialData::Kind::Gaussian: {
        if (g.spec().kind != GroupKind::RealLine)
            throw ConfigError("Gaussian initial data needs a RealLine group");
        if (!(u0.width > 0.0))
            throw ConfigError("Gaussian width must be positive");
        if (g.spec().halfwidth < 6.0 * u0.width)
            throw ConfigError("Gaussian width too large for the window: need halfwidth >= 6*width "
                              "so the grid holds the profile and its spectrum");
        return;
    }
    }
}

} // namespace

std::vector<double> u0_field(const InitialData& u0, const Group& g) {
    validate(u0, g);
    std::vector<double> f(g.size(), 0.0);
    switch (u0.kind) {
    case InitialData::Kind::PointMass:
        f[g.identity()] = 1.0;
        break;
    case InitialData::Kind::ConstantOne:
        std::fill(f.begin(), f.end(), 1.0);
        break;
    case InitialData::Kind::Gaussian:
        for (std::size_t x = 0; x < g.size(); ++x) {
            const double xv = g.coords(x)[0];
            f[x] = std::exp(-xv * xv / (2.0 * u0.width * u0.width));
        }
        break;
    }
    return f;
}

std::vector<double> u0_spectrum_sq(const InitialData& u0, const Group& g) {
    validate(u0, g);
    std::vector<double> s(g.size(), 0.0);
    switch (u0.kind) {
    case InitialData::Kind::PointMass: {
        const double v = g.haar_weight() * g.haar_weight();
        std::fill(s.begin(), s.end(), v);
        break;
    }
    case InitialData::Kind::ConstantOne: {
        const double mass = g.total_mass();
        s[g.dual_identity()] = mass * mass;
        break;
    }
    case InitialData::Kind::Gaussian: {
        const double w2 = u0.width * u0.width;
        const double scale = 2.0 * std::numbers::pi * w2;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double xi = g.dual_coords(k)[0];
            s[k] = scale * std::exp(-w2 * xi * xi);
        }
        break;
    }
    }
    return s;
}

double u0_log_norm_sq(const InitialData& u0, const Group& g) {
    const std::vector<double> s = u0_spectrum_sq(u0, g);
    const double lw = std::log(g.dual_weight());
    logdom::LogAccum acc;
    for (double v : s)
        if (v > 0.0) acc.add(lw + std::log(v));
    return acc.value();
}

double u0_min_abs(const InitialData& u0, const Group& g) {
    const std::vector<double> f = u0_field(u0, g);
    double m = std::numeric_limits<double>::infinity();
    for (double v : f) m = std::min(m, std::abs(v));
    return m;
}

} // namespace she
