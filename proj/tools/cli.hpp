#pragma once

namespace meshpoc::cli {

/// Entry point for the `meshpoc` tool. Returns the process exit code:
/// 0 success, 1 runtime failure, 2 usage error.
int run(int argc, char** argv);

}  // namespace meshpoc::cli
