#pragma once

#include <functional>
#include <string>

namespace iqa {

using WarningHandler = std::function<void(const std::string&)>;

/// Routes non-fatal conditions (degenerate inputs, excluded folds, masked
/// cells). The default handler prints "warning: <msg>" to stderr. Returns the
/// previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace iqa
