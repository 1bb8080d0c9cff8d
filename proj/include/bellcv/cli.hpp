#pragma once

#include <string>
#include <vector>

#include "bellcv/states.hpp"

namespace bellcv {

// Entry point of the bellcv tool. Returns the process exit code: 0 on
// success, 2 on usage errors, 1 on numerical failures.
int run_cli(int argc, const char* const* argv);

// Parse the --state grammar: ghz:N,r | cluster4 | w4 | extended_cluster:N |
// extended_superposition:N.
PureState parse_state_arg(const std::string& text);

// Parse --eta: a single value or a comma-separated per-mode list.
std::vector<double> parse_eta_arg(const std::string& text);

}  // namespace bellcv
