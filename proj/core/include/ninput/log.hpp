#pragma once

#include <functional>
#include <string_view>

namespace ninput {

using WarningHandler = std::function<void(std::string_view)>;

// Warnings go to stderr unless a handler is installed. Returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace ninput
