#pragma once
#include <iosfwd>

namespace snow3g::cli {

enum ExitCode : int
{
  exit_ok = 0,
  exit_verify_failed = 1,
  exit_usage = 2,
  exit_io = 3,
};

// Entry point shared by the snow3g binary and the tests. Normal output goes
// to out, diagnostics to err.
int
run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}
