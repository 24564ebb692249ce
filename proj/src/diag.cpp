#include "protoeval/diag.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace protoeval {

namespace {
std::mutex g_mutex;
WarnHandler g_handler;
}  // namespace

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (g_handler) {
        g_handler(message);
    } else {
        std::cerr << "[protoeval] warning: " << message << '\n';
    }
}

WarnHandler set_warn_handler(WarnHandler handler) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::swap(g_handler, handler);
    return handler;
}

}  // namespace protoeval
