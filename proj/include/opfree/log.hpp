#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace opfree {

// Diagnostics go to stderr and are controlled by OPFREE_LOG=quiet|info|debug.
// Default is info: warnings and one-line run summaries, no per-iteration noise.
enum class LogLevel { quiet = 0, info = 1, debug = 2 };

inline LogLevel log_level() {
    static const LogLevel lvl = [] {
        const char* env = std::getenv("OPFREE_LOG");
        if (env == nullptr) return LogLevel::info;
        std::string_view s(env);
        if (s == "quiet") return LogLevel::quiet;
        if (s == "debug") return LogLevel::debug;
        return LogLevel::info;
    }();
    return lvl;
}

inline void log_info(const std::string& msg) {
    if (static_cast<int>(log_level()) >= static_cast<int>(LogLevel::info))
        std::cerr << "[opfree] " << msg << '\n';
}

inline void log_debug(const std::string& msg) {
    if (static_cast<int>(log_level()) >= static_cast<int>(LogLevel::debug))
        std::cerr << "[opfree:debug] " << msg << '\n';
}

} // namespace opfree
