#pragma once

#include <functional>
#include <string>

namespace protoeval {

// Warning sink for non-fatal diagnostics (overlapping rules, multi-match
// explanations, skipped folds). Defaults to stderr; tests can capture it.
using WarnHandler = std::function<void(const std::string&)>;

void warn(const std::string& message);
WarnHandler set_warn_handler(WarnHandler handler);

}  // namespace protoeval
