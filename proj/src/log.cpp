#include "graphbus/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace graphbus::log {
namespace {

Level parse_env_level() {
  const char* env = std::getenv("GRAPHBUS_LOG");
  if (env == nullptr) return Level::warn;
  if (std::strcmp(env, "debug") == 0) return Level::debug;
  if (std::strcmp(env, "info") == 0) return Level::info;
  if (std::strcmp(env, "warn") == 0) return Level::warn;
  if (std::strcmp(env, "error") == 0) return Level::error;
  if (std::strcmp(env, "off") == 0) return Level::off;
  return Level::warn;
}

const char* level_name(Level l) {
  switch (l) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    case Level::off: return "off";
  }
  return "?";
}

std::atomic<int> g_level{static_cast<int>(parse_env_level())};

std::mutex g_handler_mu;
std::function<void(Level, std::string_view)> g_handler;

}  // namespace

void set_level(Level level) noexcept { g_level.store(static_cast<int>(level)); }

Level level() noexcept { return static_cast<Level>(g_level.load()); }

void set_handler(std::function<void(Level, std::string_view)> handler) {
  std::lock_guard lock(g_handler_mu);
  g_handler = std::move(handler);
}

void emit(Level lvl, const std::string& message) {
  if (static_cast<int>(lvl) < g_level.load(std::memory_order_relaxed)) return;
  {
    std::lock_guard lock(g_handler_mu);
    if (g_handler) {
      g_handler(lvl, message);
      return;
    }
  }
  std::fprintf(stderr, "[graphbus %s] %s\n", level_name(lvl), message.c_str());
}

}  // namespace graphbus::log
