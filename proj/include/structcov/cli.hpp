#pragma once

namespace structcov {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitNotIdentifiable = 4;

/// Entry point of the structcov command line tool; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace structcov
