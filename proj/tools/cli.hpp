// Command-line front end. Exit codes are part of the interface:
//   0 success, 1 internal error, 2 usage error, 3 configuration error,
//   4 file error, 5 divergence, 6 numerical failure (quadrature, singular
//   system, embedding).
#pragma once

#include <ostream>

namespace spdelab_cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitIo = 4,
  kExitDivergence = 5,
  kExitNumerical = 6,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spdelab_cli
