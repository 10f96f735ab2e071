// Minimal leveled logging to stderr, controlled by RIGIDTRACK_LOG
// (error|warn|info|debug). Default: warn.

#pragma once

#include <iostream>
#include <sstream>
#include <string>

namespace rigidtrack::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level threshold();
void set_threshold(Level level);

namespace detail {
void emit(Level level, const std::string& message);
}

template <typename... Args>
void message(Level level, Args&&... args) {
  if (level > threshold()) return;
  std::ostringstream os;
  (os << ... << std::forward<Args>(args));
  detail::emit(level, os.str());
}

template <typename... Args>
void error(Args&&... args) { message(Level::Error, std::forward<Args>(args)...); }
template <typename... Args>
void warn(Args&&... args) { message(Level::Warn, std::forward<Args>(args)...); }
template <typename... Args>
void info(Args&&... args) { message(Level::Info, std::forward<Args>(args)...); }
template <typename... Args>
void debug(Args&&... args) { message(Level::Debug, std::forward<Args>(args)...); }

}  // namespace rigidtrack::log
