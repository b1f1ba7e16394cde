#pragma once

#include <ostream>

namespace ccnet {

/// Fast internal consistency checks against brute-force references.
/// Prints one line per check and returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace ccnet
