#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

#include "graphbus/errors.hpp"

namespace graphbus {

/// Relative clock: now() reports the time elapsed since a settable reference
/// epoch, at nanosecond resolution. Reads are lock-free. In virtual mode the
/// clock only moves when advanced explicitly, which keeps simulated runs
/// deterministic.
class TimeSystem {
 public:
  using Duration = std::chrono::nanoseconds;
  using WallClock = std::chrono::steady_clock;

  /// Epoch = construction instant.
  TimeSystem() { set_epoch(WallClock::now()); }

  void set_epoch_now() { set_epoch(WallClock::now()); }

  /// Injects an arbitrary epoch (possibly in the past): now() becomes
  /// wall - epoch exactly.
  void set_epoch(WallClock::time_point epoch) {
    virtual_mode_.store(false, std::memory_order_relaxed);
    epoch_ns_.store(epoch.time_since_epoch().count(),
                    std::memory_order_release);
  }

  /// Switches to manually advanced time starting at `initial`.
  void enable_virtual(Duration initial = Duration::zero()) {
    virtual_ns_.store(initial.count(), std::memory_order_relaxed);
    virtual_mode_.store(true, std::memory_order_release);
  }

  bool virtual_mode() const noexcept {
    return virtual_mode_.load(std::memory_order_relaxed);
  }

  /// Virtual mode only; delta must be non-negative so now() stays monotone.
  void advance(Duration delta) {
    if (!virtual_mode()) {
      raise(Errc::invalid_argument, "advance() requires virtual time mode");
    }
    if (delta < Duration::zero()) {
      raise(Errc::invalid_argument, "virtual time cannot move backwards");
    }
    virtual_ns_.fetch_add(delta.count(), std::memory_order_acq_rel);
  }

  /// Monotonically non-decreasing between epoch resets.
  Duration now() const noexcept {
    if (virtual_mode()) {
      return Duration(virtual_ns_.load(std::memory_order_acquire));
    }
    auto wall = WallClock::now().time_since_epoch().count();
    return Duration(wall - epoch_ns_.load(std::memory_order_acquire));
  }

  std::int64_t now_ns() const noexcept { return now().count(); }

 private:
  std::atomic<std::int64_t> epoch_ns_{0};
  std::atomic<std::int64_t> virtual_ns_{0};
  std::atomic<bool> virtual_mode_{false};
};

}  // namespace graphbus
