#pragma once

#include <stdexcept>
#include <string>

namespace she {

// Invalid user-supplied configuration (bad group parameters, mismatched exponent kind,
// unknown config keys, ...).  CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric routine could not produce a trustworthy result.  CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    enum class Kind {
        NonFinite,      // overflow/NaN in a place where the math should be finite
        Unstable,       // simulation blow-up beyond representable range
        GridTooCoarse,  // step-halving check failed its tolerance
        OutOfRange,     // requested value outside the solvable bracket
        NotConverged,   // iteration failed to converge
        DalangFails,    // second-moment theory not applicable to this model
    };

    NumericError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

} // namespace she
