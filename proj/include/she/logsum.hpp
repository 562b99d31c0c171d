#pragma once

// Log-domain arithmetic helpers.  Second moments grow like exp(const * lambda^4 * t),
// far beyond double range, so every accumulation that can overflow is done on logs.

#include <cmath>
#include <limits>
#include <span>

namespace she::logdom {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b), stable for any ordering and for -inf arguments.
inline double lse2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = a > b ? a : b;
    return m + std::log1p(std::exp(-(std::fabs(a - b))));
}

// Streaming log-sum-exp with a running max pivot.  Exact enough for ~1e9 adds.
class LogAccum {
public:
    void add(double x) {
        if (x == kNegInf) return;
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            // rescale the accumulated sum to the new pivot
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
    }
    double value() const {
        if (max_ == kNegInf) return kNegInf;
        return max_ + std::log(sum_);
    }

private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

inline double lse(std::span<const double> xs) {
    LogAccum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

// log(1 - e^{-x}) for x > 0, stable near both ends.
inline double log1mexp(double x) {
    // crossover at log 2 per the usual recipe
    return x > 0.6931471805599453 ? std::log1p(-std::exp(-x)) : std::log(-std::expm1(-x));
}

// phi(z) = (e^z - 1)/z, the first exponential moment weight; phi(0) = 1, phi > 0 on R.
inline double phi_exp(double z) {
    if (std::fabs(z) < 1e-8) return 1.0 + 0.5 * z;
    return std::expm1(z) / z;
}

// log phi(z), stable for large |z| (phi(z) ~ e^z / z for z >> 0, ~ 1/|z| for z << 0).
inline double log_phi_exp(double z) {
    if (std::fabs(z) < 1e-5) return std::log1p(z * (0.5 + z / 12.0));
    if (z > 0.0) {
        if (z > 700.0) return z - std::log(z); // expm1 would overflow; e^z dominates
        return std::log(std::expm1(z)) - std::log(z);
    }
    return std::log(-std::expm1(z)) - std::log(-z);
}

// (log phi)'(z) = 1/(1 - e^{-z}) - 1/z, strictly inside (0, 1) for finite z.
// Series near 0: 1/2 + z/12 - z^3/720 (the direct form loses digits to cancellation).
inline double dlog_phi_exp(double z) {
    if (std::fabs(z) < 1e-3) return 0.5 + z / 12.0 - z * z * z / 720.0;
    return 1.0 / (-std::expm1(-z)) - 1.0 / z;
}

// Compensated (Neumaier) accumulator for plain-domain sums whose terms vary in size.
class NeumaierSum {
public:
    void add(double x) {
        const double t = s_ + x;
        if (std::fabs(s_) >= std::fabs(x)) {
            c_ += (s_ - t) + x;
        } else {
            c_ += (x - t) + s_;
        }
        s_ = t;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

} // namespace she::logdom
