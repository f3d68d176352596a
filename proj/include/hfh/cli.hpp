#pragma once

// Batch front end behind the `hfh` executable. Kept in the library so tests can
// drive it in-process.

#include <ostream>
#include <string>

namespace hfh {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

// FNV-1a, printed as 16 hex digits.
std::string digest_hex(const std::string& text);

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hfh
