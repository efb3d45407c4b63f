#include "iqa/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace iqa {

namespace {
std::mutex g_mutex;
WarningHandler g_handler = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(g_mutex);
    std::swap(g_handler, handler);
    return handler;
}

void warn(const std::string& message) {
    std::lock_guard lock(g_mutex);
    if (g_handler) g_handler(message);
}

}  // namespace iqa
