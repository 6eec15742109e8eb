#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "biaslab/error.hpp"

namespace biaslab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitModelData = 2;
inline constexpr int kExitInvariant = 3;

int exit_code_for(ErrorKind kind) noexcept;

/// Runs one command.  `args` excludes the program name.  Results go to
/// `out` (or to --out), diagnostics to `err` as "ERROR:<code>:<kind>: ...".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biaslab::cli
