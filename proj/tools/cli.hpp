#pragma once

#include <iosfwd>

namespace qngf::cli {

/// Process exit codes.
enum ExitCode : int {
  exit_ok = 0,
  exit_io = 1,          // unreadable/unwritable files, unexpected failures
  exit_config = 2,      // bad flags, config file or parameter values
  exit_numerical = 3,   // eigensolver residual, singular fit, unstable coupling, unphysical state
  exit_empty = 4,       // nothing to report: no peaks, too few points
  exit_bad_input = 5,   // input data rejected (e.g. disconnected graph)
};

/// Parses arguments, runs one subcommand, writes <out>/manifest.json and
/// returns the exit code. Summary lines go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qngf::cli
