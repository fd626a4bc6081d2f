#include "graphbus/bridge.hpp"

#include <sys/socket.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <unordered_set>
#include <vector>

#include "graphbus/log.hpp"
#include "graphbus/wire.hpp"
#include "socket.hpp"

namespace graphbus {
namespace {

using detail::Listener;
using detail::Socket;

constexpr std::size_t kPeerQueueLimit = 1024;
constexpr auto kBackoffFloor = std::chrono::milliseconds(100);
constexpr auto kBackoffCap = std::chrono::milliseconds(5000);

// Outer stream framing: u32 LE length + frame. Anything claiming to be
// larger than a maximal frame means the stream is desynced or hostile.
constexpr std::size_t kMaxOuterFrame = wire::kMaxFrameBytes;

std::vector<std::byte> with_outer_prefix(const ChannelId& channel,
                                         std::span<const std::byte> data) {
  std::vector<std::byte> out(4);
  wire::pack_into(out, channel, data);
  wire::put_u32le(out.data(), static_cast<std::uint32_t>(out.size() - 4));
  return out;
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  auto [p, ec] = std::to_chars(buf, buf + 16, v, 16);
  return std::string(buf, p);
}

bool from_hex(std::string_view s, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
  return ec == std::errc{} && p == s.data() + s.size();
}

/// Reads one outer-prefixed frame. Returns false on EOF, error or an
/// implausible length (desynced stream).
bool read_outer_frame(Socket& sock, std::vector<std::byte>& frame) {
  std::byte prefix[4];
  if (!sock.read_exact(prefix)) return false;
  std::uint32_t len = wire::get_u32le(prefix);
  if (len > kMaxOuterFrame) return false;
  frame.resize(len);
  return sock.read_exact(frame);
}

}  // namespace

struct Bridge::Impl {
  struct Peer {
    Socket sock;
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::shared_ptr<const std::vector<std::byte>>> queue;
    std::unordered_set<std::string> channels;
    std::uint64_t peer_instance = 0;
    bool suppressed = false;  // the peer is this very process
    bool handshaken = false;
    bool closed = false;
    std::thread writer;
    std::thread reader;

    void close() {
      {
        std::lock_guard lock(mu);
        closed = true;
      }
      sock.interrupt();
      cv.notify_all();
    }
  };

  struct SubLink {
    Uri uri;
    std::vector<std::string> channels;
    std::mutex sock_mu;
    Socket sock;
    std::atomic<bool> connected{false};
    std::thread thread;
  };

  InboundSink sink;
  std::uint64_t instance_id = 0;

  std::atomic<bool> stopping{false};
  std::mutex stop_mu;
  std::condition_variable stop_cv;  // interrupts backoff sleeps

  std::unique_ptr<Listener> listener;
  std::thread accept_thread;
  std::mutex peers_mu;
  std::vector<std::shared_ptr<Peer>> peers;

  std::vector<std::unique_ptr<SubLink>> links;

  // counters
  std::atomic<std::uint64_t> frames_sent{0}, frames_received{0};
  std::atomic<std::uint64_t> frames_discarded{0}, frames_unrouted{0};
  std::atomic<std::uint64_t> bytes_sent{0}, bytes_received{0};
  std::atomic<std::uint64_t> dropped_backpressure{0};

  bool wait_or_stop(std::chrono::milliseconds delay) {
    std::unique_lock lock(stop_mu);
    return stop_cv.wait_for(lock, delay, [&] { return stopping.load(); });
  }

  // ---- publisher side -------------------------------------------------

  void accept_loop() {
    while (!stopping.load()) {
      Socket sock = listener->accept();
      if (!sock.valid()) {
        if (stopping.load()) return;
        continue;
      }
      reap_dead_peers();
      auto peer = std::make_shared<Peer>();
      peer->sock = std::move(sock);
      // The reader performs the handshake so a stalling peer cannot block
      // the accept loop; until it lands the peer subscribes to nothing.
      peer->writer = std::thread([this, peer] { peer_writer(peer); });
      peer->reader = std::thread([this, peer] { peer_reader(peer); });
      std::lock_guard lock(peers_mu);
      peers.push_back(std::move(peer));
    }
  }

  bool handshake_peer(const std::shared_ptr<Peer>& peer) {
    std::vector<std::byte> frame;
    if (!read_outer_frame(peer->sock, frame)) return false;
    auto outcome = wire::unpack(frame);
    auto* ok = std::get_if<wire::Unpacked>(&outcome);
    if (ok == nullptr || ok->channel != kSubscribeChannel) {
      log::warn("peer connected without a subscription handshake; dropped");
      return false;
    }
    std::string_view payload(
        reinterpret_cast<const char*>(ok->payload.data()),
        ok->payload.size());
    std::unordered_set<std::string> channels;
    std::uint64_t peer_instance = 0;
    bool first_line = true;
    while (!payload.empty()) {
      auto nl = payload.find('\n');
      std::string_view line = payload.substr(0, nl);
      payload = (nl == std::string_view::npos) ? std::string_view{}
                                               : payload.substr(nl + 1);
      if (first_line) {
        first_line = false;
        if (!from_hex(line, peer_instance)) {
          log::warn("malformed subscription handshake; dropped peer");
          return false;
        }
        continue;
      }
      if (line.empty()) continue;
      if (ChannelId::validate(line) == Errc::ok) {
        channels.emplace(line);
      }
    }
    if (first_line) return false;  // empty payload: no instance id
    std::lock_guard lock(peer->mu);
    peer->channels = std::move(channels);
    peer->peer_instance = peer_instance;
    peer->suppressed = (peer_instance == instance_id);
    peer->handshaken = true;
    return true;
  }

  void peer_writer(const std::shared_ptr<Peer>& peer) {
    for (;;) {
      std::shared_ptr<const std::vector<std::byte>> msg;
      {
        std::unique_lock lock(peer->mu);
        peer->cv.wait(lock,
                      [&] { return peer->closed || !peer->queue.empty(); });
        if (peer->closed && peer->queue.empty()) return;
        msg = std::move(peer->queue.front());
        peer->queue.pop_front();
      }
      if (!peer->sock.write_all(*msg)) {
        peer->close();
        return;
      }
      frames_sent.fetch_add(1, std::memory_order_relaxed);
      bytes_sent.fetch_add(msg->size(), std::memory_order_relaxed);
    }
  }

  void peer_reader(const std::shared_ptr<Peer>& peer) {
    if (!handshake_peer(peer)) {
      peer->close();
      return;
    }
    // Nothing meaningful flows this way afterwards; the read detects
    // disconnects.
    std::byte scratch[1024];
    for (;;) {
      int fd = peer->sock.fd();
      if (fd < 0) return;
      ssize_t n = ::recv(fd, scratch, sizeof(scratch), 0);
      if (n <= 0) {
        peer->close();
        return;
      }
    }
  }

  void reap_dead_peers() {
    std::vector<std::shared_ptr<Peer>> dead;
    {
      std::lock_guard lock(peers_mu);
      std::erase_if(peers, [&](const std::shared_ptr<Peer>& p) {
        std::lock_guard plk(p->mu);
        if (p->closed) {
          dead.push_back(p);
          return true;
        }
        return false;
      });
    }
    for (auto& p : dead) {
      if (p->writer.joinable()) p->writer.join();
      if (p->reader.joinable()) p->reader.join();
    }
  }

  // ---- subscriber side -------------------------------------------------

  void link_loop(SubLink& link) {
    auto backoff = kBackoffFloor;
    std::vector<std::byte> frame;
    while (!stopping.load()) {
      Socket sock = detail::connect_once(link.uri);
      if (!sock.valid()) {
        if (wait_or_stop(backoff)) return;
        backoff = std::min(backoff * 2, kBackoffCap);
        continue;
      }
      {
        std::lock_guard lock(link.sock_mu);
        link.sock = std::move(sock);
      }
      if (!send_handshake(link)) {
        std::lock_guard lock(link.sock_mu);
        link.sock.close();
        if (wait_or_stop(backoff)) return;
        backoff = std::min(backoff * 2, kBackoffCap);
        continue;
      }
      backoff = kBackoffFloor;  // a successful session resets the schedule
      link.connected.store(true);

      while (!stopping.load()) {
        if (!read_outer_frame(link.sock, frame)) break;
        frames_received.fetch_add(1, std::memory_order_relaxed);
        bytes_received.fetch_add(4 + frame.size(), std::memory_order_relaxed);
        dispatch_inbound(frame);
      }

      link.connected.store(false);
      {
        std::lock_guard lock(link.sock_mu);
        link.sock.close();
      }
      if (wait_or_stop(backoff)) return;
    }
  }

  bool send_handshake(SubLink& link) {
    std::string payload = to_hex(instance_id);
    for (const auto& c : link.channels) {
      payload += '\n';
      payload += c;
    }
    auto bytes = std::as_bytes(std::span(payload.data(), payload.size()));
    auto msg = with_outer_prefix(ChannelId(kSubscribeChannel), bytes);
    std::lock_guard lock(link.sock_mu);
    return link.sock.write_all(msg);
  }

  void dispatch_inbound(std::span<const std::byte> frame) {
    auto outcome = wire::unpack(frame);
    if (auto* reason = std::get_if<wire::DiscardReason>(&outcome)) {
      frames_discarded.fetch_add(1, std::memory_order_relaxed);
      log::debug(std::string("inbound frame discarded: ") +
                 wire::discard_reason_name(*reason));
      return;
    }
    const auto& ok = std::get<wire::Unpacked>(outcome);
    switch (sink(ok.channel, ok.payload)) {
      case SinkResult::delivered:
        break;
      case SinkResult::unrouted:
        frames_unrouted.fetch_add(1, std::memory_order_relaxed);
        break;
      case SinkResult::decode_failed:
        frames_discarded.fetch_add(1, std::memory_order_relaxed);
        break;
    }
  }
};

Bridge::Bridge(const NetworkConfig& config, InboundSink sink,
               std::uint64_t instance_id)
    : config_(config), instance_id_(instance_id),
      impl_(std::make_unique<Impl>()) {
  impl_->sink = std::move(sink);
  impl_->instance_id = instance_id;
  if (config_.publisher) {
    impl_->listener = std::make_unique<Listener>(config_.publisher->uri);
    impl_->accept_thread = std::thread([im = impl_.get()] { im->accept_loop(); });
  }
  for (const auto& sub : config_.subscribers) {
    auto link = std::make_unique<Impl::SubLink>();
    link->uri = sub.uri;
    for (const auto& c : sub.channels) link->channels.push_back(c.name());
    impl_->links.push_back(std::move(link));
  }
  for (auto& link : impl_->links) {
    link->thread =
        std::thread([im = impl_.get(), l = link.get()] { im->link_loop(*l); });
  }
}

Bridge::~Bridge() { stop(); }

void Bridge::publish_outbound(const ChannelId& channel,
                              std::span<const std::byte> data_string) {
  Impl& im = *impl_;
  if (im.stopping.load()) return;

  std::shared_ptr<const std::vector<std::byte>> msg;
  std::lock_guard lock(im.peers_mu);
  for (auto& peer : im.peers) {
    std::lock_guard plk(peer->mu);
    if (peer->closed || peer->suppressed) continue;
    if (!peer->channels.contains(channel.name())) continue;
    if (!msg) {
      msg = std::make_shared<const std::vector<std::byte>>(
          with_outer_prefix(channel, data_string));
    }
    if (peer->queue.size() >= kPeerQueueLimit) {
      peer->queue.pop_front();
      im.dropped_backpressure.fetch_add(1, std::memory_order_relaxed);
    }
    peer->queue.push_back(msg);
    peer->cv.notify_all();
  }
}

BridgeStats Bridge::stats() const {
  Impl& im = *impl_;
  BridgeStats s;
  s.frames_sent = im.frames_sent.load();
  s.frames_received = im.frames_received.load();
  s.frames_discarded = im.frames_discarded.load();
  s.frames_unrouted = im.frames_unrouted.load();
  s.bytes_sent = im.bytes_sent.load();
  s.bytes_received = im.bytes_received.load();
  s.frames_dropped_backpressure = im.dropped_backpressure.load();
  {
    std::lock_guard lock(im.peers_mu);
    for (const auto& p : im.peers) {
      std::lock_guard plk(p->mu);
      if (!p->closed && p->handshaken) ++s.publisher_peers;
    }
  }
  for (const auto& link : im.links) {
    if (link->connected.load()) ++s.subscriber_links;
  }
  return s;
}

std::string Bridge::bound_endpoint() const {
  if (!impl_->listener) return {};
  return impl_->listener->bound_text();
}

std::uint16_t Bridge::bound_port() const {
  if (!impl_->listener) return 0;
  return impl_->listener->bound_port();
}

void Bridge::stop() {
  Impl& im = *impl_;
  bool expected = false;
  if (!im.stopping.compare_exchange_strong(expected, true)) return;
  {
    std::lock_guard lock(im.stop_mu);
  }
  im.stop_cv.notify_all();

  if (im.listener) im.listener->interrupt();
  if (im.accept_thread.joinable()) im.accept_thread.join();

  {
    std::lock_guard lock(im.peers_mu);
    for (auto& peer : im.peers) peer->close();
  }
  for (auto& peer : im.peers) {
    if (peer->writer.joinable()) peer->writer.join();
    if (peer->reader.joinable()) peer->reader.join();
  }
  im.peers.clear();

  for (auto& link : im.links) {
    {
      std::lock_guard lock(link->sock_mu);
      link->sock.interrupt();
    }
    if (link->thread.joinable()) link->thread.join();
  }
  im.listener.reset();
}

}  // namespace graphbus
