#pragma once

namespace lanesafe::harness {

/// Entry point of the command-line tool. Returns the process exit status.
int run_cli(int argc, char** argv);

}  // namespace lanesafe::harness
