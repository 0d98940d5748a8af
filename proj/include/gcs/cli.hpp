#pragma once

namespace gcs {

// Full command-line entry point: parses argv, dispatches to the verify or
// experiment command, and returns the process exit code (0 success, 1 failed
// checks or runtime error, 2 usage or config error).
int cli_run(int argc, const char* const* argv);

}  // namespace gcs
