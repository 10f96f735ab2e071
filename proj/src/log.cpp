#include "rigidtrack/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace rigidtrack::log {

namespace {

Level initial_threshold() {
  const char* env = std::getenv("RIGIDTRACK_LOG");
  if (env == nullptr) return Level::Warn;
  if (std::strcmp(env, "error") == 0) return Level::Error;
  if (std::strcmp(env, "warn") == 0) return Level::Warn;
  if (std::strcmp(env, "info") == 0) return Level::Info;
  if (std::strcmp(env, "debug") == 0) return Level::Debug;
  return Level::Warn;
}

std::atomic<Level>& threshold_storage() {
  static std::atomic<Level> level{initial_threshold()};
  return level;
}

const char* tag(Level level) {
  switch (level) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() { return threshold_storage().load(std::memory_order_relaxed); }

void set_threshold(Level level) { threshold_storage().store(level, std::memory_order_relaxed); }

namespace detail {

void emit(Level level, const std::string& message) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[rigidtrack " << tag(level) << "] " << message << "\n";
}

}  // namespace detail

}  // namespace rigidtrack::log
