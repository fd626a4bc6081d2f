#include "socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "graphbus/errors.hpp"

namespace graphbus::detail {
namespace {

constexpr int kConnectTimeoutMs = 3000;

sockaddr_un make_unix_addr(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
  return addr;
}

}  // namespace

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_.store(other.fd_.exchange(-1));
  }
  return *this;
}

void Socket::interrupt() noexcept {
  int fd = fd_.load();
  if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
}

void Socket::close() noexcept {
  int fd = fd_.exchange(-1);
  if (fd >= 0) ::close(fd);
}

bool Socket::write_all(std::span<const std::byte> data) noexcept {
  const std::byte* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    int fd = fd_.load();
    if (fd < 0) return false;
    ssize_t n = ::send(fd, p, left, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (n == 0) return false;
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  return true;
}

bool Socket::read_exact(std::span<std::byte> out) noexcept {
  std::byte* p = out.data();
  std::size_t left = out.size();
  while (left > 0) {
    int fd = fd_.load();
    if (fd < 0) return false;
    ssize_t n = ::recv(fd, p, left, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (n == 0) return false;  // peer closed
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  return true;
}

Listener::Listener(const Uri& uri) {
  int fd = -1;
  if (uri.is_tcp()) {
    fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) {
      raise(Errc::bind_failure, "socket(): " + std::string(strerror(errno)));
    }
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(uri.port);
    if (uri.host == "*" || uri.host == "0.0.0.0") {
      addr.sin_addr.s_addr = htonl(INADDR_ANY);
    } else if (uri.host == "localhost") {
      addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    } else if (::inet_pton(AF_INET, uri.host.c_str(), &addr.sin_addr) != 1) {
      ::close(fd);
      raise(Errc::bind_failure,
            "cannot bind '" + uri.text + "': host must be *, an IPv4 "
            "address, or localhost");
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      int err = errno;
      ::close(fd);
      raise(Errc::bind_failure,
            "bind " + uri.text + ": " + std::string(strerror(err)));
    }
    sockaddr_in actual{};
    socklen_t len = sizeof(actual);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&actual), &len);
    bound_port_ = ntohs(actual.sin_port);
    bound_text_ =
        "tcp://" + uri.host + ":" + std::to_string(bound_port_);
  } else {
    fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) {
      raise(Errc::bind_failure, "socket(): " + std::string(strerror(errno)));
    }
    sockaddr_un addr = make_unix_addr(uri.path);
    // A live listener would also fail the bind below; a stale file from a
    // crashed process must not.
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) {
      ::close(fd);
      raise(Errc::bind_failure,
            "bind " + uri.text + ": address already in use");
    }
    ::unlink(uri.path.c_str());
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      int err = errno;
      ::close(fd);
      raise(Errc::bind_failure,
            "bind " + uri.text + ": " + std::string(strerror(err)));
    }
    unlink_path_ = uri.path;
    bound_text_ = uri.text;
  }
  if (::listen(fd, 64) != 0) {
    int err = errno;
    ::close(fd);
    if (!unlink_path_.empty()) ::unlink(unlink_path_.c_str());
    raise(Errc::bind_failure,
          "listen " + uri.text + ": " + std::string(strerror(err)));
  }
  tcp_ = uri.is_tcp();
  socket_ = Socket(fd);
}

Listener::~Listener() {
  socket_.close();
  if (!unlink_path_.empty()) ::unlink(unlink_path_.c_str());
}

Socket Listener::accept() noexcept {
  int fd = socket_.fd();
  if (fd < 0) return Socket{};
  int peer = ::accept4(fd, nullptr, nullptr, SOCK_CLOEXEC);
  if (peer < 0) return Socket{};
  if (tcp_) {
    int one = 1;
    ::setsockopt(peer, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  return Socket(peer);
}

void Listener::interrupt() noexcept { socket_.interrupt(); }

Socket connect_once(const Uri& uri) noexcept {
  int fd = -1;
  sockaddr_storage storage{};
  socklen_t addr_len = 0;
  if (uri.is_tcp()) {
    fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) return Socket{};
    auto* addr = reinterpret_cast<sockaddr_in*>(&storage);
    addr->sin_family = AF_INET;
    addr->sin_port = htons(uri.port);
    if (uri.host == "localhost") {
      addr->sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    } else if (::inet_pton(AF_INET, uri.host.c_str(), &addr->sin_addr) != 1) {
      // Fall back to resolver for names.
      addrinfo hints{};
      hints.ai_family = AF_INET;
      hints.ai_socktype = SOCK_STREAM;
      addrinfo* res = nullptr;
      if (::getaddrinfo(uri.host.c_str(), nullptr, &hints, &res) != 0 ||
          res == nullptr) {
        ::close(fd);
        return Socket{};
      }
      addr->sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
      ::freeaddrinfo(res);
    }
    addr_len = sizeof(sockaddr_in);
  } else {
    fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) return Socket{};
    auto* addr = reinterpret_cast<sockaddr_un*>(&storage);
    *addr = make_unix_addr(uri.path);
    addr_len = sizeof(sockaddr_un);
  }

  // Bounded connect: non-blocking + poll, then back to blocking mode.
  int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(fd, reinterpret_cast<sockaddr*>(&storage), addr_len);
  if (rc != 0 && errno == EINPROGRESS) {
    pollfd pfd{fd, POLLOUT, 0};
    rc = ::poll(&pfd, 1, kConnectTimeoutMs);
    if (rc == 1) {
      int err = 0;
      socklen_t len = sizeof(err);
      ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
      rc = (err == 0) ? 0 : -1;
    } else {
      rc = -1;
    }
  }
  if (rc != 0) {
    ::close(fd);
    return Socket{};
  }
  ::fcntl(fd, F_SETFL, flags);
  if (uri.is_tcp()) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  return Socket(fd);
}

}  // namespace graphbus::detail
