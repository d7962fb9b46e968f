#pragma once

#include <iosfwd>

namespace cvxpoly::cli {

enum ExitCode : int {
  kOk = 0,
  kSolverFailure = 2,
  kBadInput = 3,  // parse error, missing file, infeasible order, failed precondition
  kRefused = 4,   // sdr without a certificate and without --force
};

/// Runs one command; reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cvxpoly::cli
