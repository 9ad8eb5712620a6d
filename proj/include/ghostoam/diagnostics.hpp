#pragma once

#include <functional>
#include <string>

namespace ghostoam::diagnostics {

using Sink = std::function<void(const std::string&)>;

/// Emits a warning through the installed sink (stderr by default).
void warn(const std::string& message);

/// Replaces the warning sink and returns the previous one.
Sink set_warning_sink(Sink sink);

}  // namespace ghostoam::diagnostics
