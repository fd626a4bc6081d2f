#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "graphbus/net_config.hpp"

namespace graphbus::detail {

/// Thin RAII wrapper over a connected or listening socket fd.
/// interrupt() shuts the socket down so blocked reads/writes/accepts return,
/// which is how bridge threads get unstuck during teardown.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { close(); }

  Socket(Socket&& other) noexcept : fd_(other.fd_.exchange(-1)) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  bool valid() const noexcept { return fd_.load() >= 0; }
  int fd() const noexcept { return fd_.load(); }

  void interrupt() noexcept;  // shutdown(SHUT_RDWR), keeps the fd
  void close() noexcept;

  /// Entire span or failure. false on EOF/error/interrupt.
  bool write_all(std::span<const std::byte> data) noexcept;
  bool read_exact(std::span<std::byte> out) noexcept;

 private:
  std::atomic<int> fd_{-1};
};

/// Listening socket bound per the URI. For tcp, host "*" binds all
/// interfaces and port 0 picks an ephemeral port (see bound_port()).
/// For ipc, a stale socket file is replaced. Throws Error(bind_failure).
class Listener {
 public:
  explicit Listener(const Uri& uri);
  ~Listener();

  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  /// Blocks; invalid Socket after interrupt()/close.
  Socket accept() noexcept;

  void interrupt() noexcept;

  std::uint16_t bound_port() const noexcept { return bound_port_; }
  const std::string& bound_text() const noexcept { return bound_text_; }

 private:
  Socket socket_;
  std::string unlink_path_;  // ipc socket file to remove on close
  std::uint16_t bound_port_ = 0;
  bool tcp_ = false;
  std::string bound_text_;
};

/// One blocking connect attempt (a few seconds of patience built in).
/// Returns an invalid Socket on failure.
Socket connect_once(const Uri& uri) noexcept;

}  // namespace graphbus::detail
