#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace graphbus::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

void set_level(Level level) noexcept;
Level level() noexcept;

/// Replaces the default stderr sink. Pass nullptr to restore it.
/// The handler may be invoked concurrently from library threads.
void set_handler(std::function<void(Level, std::string_view)> handler);

void emit(Level level, const std::string& message);

inline void debug(const std::string& m) { emit(Level::debug, m); }
inline void info(const std::string& m) { emit(Level::info, m); }
inline void warn(const std::string& m) { emit(Level::warn, m); }
inline void error(const std::string& m) { emit(Level::error, m); }

}  // namespace graphbus::log
