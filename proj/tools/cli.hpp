#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace convseg::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationError = 1,
  kIoError = 2,
  kServiceError = 3,
};

/// Runs one `convseg` invocation. `args` excludes the program name. Reports
/// and artifacts go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace convseg::cli
