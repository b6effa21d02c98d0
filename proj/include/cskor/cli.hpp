#pragma once

#include <string>
#include <vector>

namespace cskor::cli {

/// Runs one CLI command (build, boundary, verify, rate, consistency,
/// report) against the given arguments; writes artifacts and returns the
/// process exit status: 0 success, 2 validation error, 3 numeric failure.
int execute(const std::vector<std::string>& args);

} // namespace cskor::cli
