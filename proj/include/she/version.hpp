#pragma once

namespace she {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kConfigSchema = "she/1";

// Default RNG seed for every stochastic routine when the caller does not set one.
// A fixed documented constant (never wall clock) so that all outputs are reproducible.
inline constexpr unsigned long long kDefaultSeed = 271828ull;

} // namespace she
