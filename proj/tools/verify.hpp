#pragma once

#include <ostream>

namespace multiphonon::cli {

// Runs the quick cross-check suite, one PASS/FAIL line per check.
// Returns true when every check passed.
bool run_verification(std::ostream& out);

} // namespace multiphonon::cli
