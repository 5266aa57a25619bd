#pragma once

namespace avsal {

// Dispatches one command-line invocation. Returns 0 on success, 1 on
// validation errors (bad flags, unreadable files), 2 on degenerate data
// (nothing scoreable, constant maps, empty fixation pools).
int run_cli(int argc, const char* const* argv);

}  // namespace avsal
