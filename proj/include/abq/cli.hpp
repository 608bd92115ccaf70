// abq -- batch front end. Exit codes: 0 success, 2 validation error,
// 3 numerical non-convergence.
#pragma once

namespace abq::cli {

int run(int argc, char** argv);

}  // namespace abq::cli
