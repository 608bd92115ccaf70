// abq -- the `selftest` subcommand: one invariant bundle per module.
#pragma once

#include <ostream>

namespace abq::selftest {

/// Runs every module's invariant bundle, printing one line each. Returns
/// true when all pass.
bool run_all(std::ostream& log);

}  // namespace abq::selftest
