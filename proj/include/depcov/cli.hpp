#pragma once

#include "depcov/error.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace depcov::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,        // bad flags or configuration values
  kFile = 3,          // missing or unwritable file
  kParse = 4,         // malformed CSV / JSON
  kDimension = 5,     // inconsistent dimensions or sizes
  kDistribution = 6,  // invalid probability distribution
  kMatrix = 7,        // weight matrix not symmetric / positive definite
};

int exit_code_for(Errc code);

/// Runs one command line (without the program name). Reports go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace depcov::cli
