#pragma once

#include <string>
#include <vector>

namespace protoeval {

// Runs one CLI invocation; args exclude the program name. Returns the process
// exit code: 0 on success, 1 on usage errors, 2 on runtime failures.
int dispatch(std::vector<std::string> args);

}  // namespace protoeval
