#pragma once

#include <functional>
#include <string>

namespace hisac {

using WarningSink = std::function<void(const std::string&)>;

/// Replaces the warning sink (default: one line on stderr). Passing an empty
/// function silences warnings. Calls to the sink are serialised.
void set_warning_sink(WarningSink sink);

void warn(const std::string& message);

} // namespace hisac
