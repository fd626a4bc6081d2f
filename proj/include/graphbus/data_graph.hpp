#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>

#include "graphbus/envelope.hpp"
#include "graphbus/errors.hpp"

namespace graphbus {

/// Execution contract of a subscriber node.
///  - serial: the callback never overlaps itself; messages are handled in
///    arrival order through an unbounded per-node FIFO.
///  - concurrent: invocations may overlap freely across pool workers, with
///    no ordering guarantee.
enum class InvokeType { serial, concurrent };

/// Opaque node handle returned by from_graph/from_any.
class NodeId {
 public:
  NodeId() = default;
  explicit NodeId(std::uint64_t v) : v_(v) {}
  std::uint64_t value() const noexcept { return v_; }
  bool valid() const noexcept { return v_ != 0; }
  friend bool operator==(NodeId, NodeId) = default;

 private:
  std::uint64_t v_ = 0;
};

/// The in-process computational graph: channel-keyed fan-out of immutable
/// message references onto a work-stealing worker pool.
///
/// Publishing never copies the payload and never runs callbacks on the
/// publisher's thread; to_graph returns as soon as the message is queued.
/// Every envelope reaches every node registered on its channel at publish
/// time exactly once; nodes registered later never see it.
class GraphRuntime {
 public:
  struct Options {
    unsigned workers = 0;  // 0 = hardware parallelism
    std::size_t queue_warn_watermark = 100'000;
  };

  using Callback = std::function<void(const Envelope&)>;

  GraphRuntime() : GraphRuntime(Options{}) {}
  explicit GraphRuntime(Options options);
  ~GraphRuntime();

  GraphRuntime(const GraphRuntime&) = delete;
  GraphRuntime& operator=(const GraphRuntime&) = delete;

  /// Non-blocking fan-out of `message` to the channel's registered nodes.
  /// Zero registered nodes is legal (the message is dropped).
  /// Throws Error(graph_shut_down) after shutdown().
  void to_graph(const ChannelId& channel, Message message);

  /// Registers a subscriber node. Only publications after registration are
  /// delivered (no replay).
  NodeId from_graph(const ChannelId& channel, InvokeType invoke, Callback cb);

  /// Removes the node: no new deliveries begin once this returns, and any
  /// in-flight callback has completed (unless called from inside the node's
  /// own callback, which only marks it for removal).
  /// Throws Error(unknown_node) for a handle this graph never issued.
  void deregister(NodeId node);

  /// True once every queued delivery has completed; false on timeout.
  bool wait_idle(std::chrono::nanoseconds timeout);

  /// Drains serial queues, cancels not-yet-started concurrent deliveries,
  /// then stops the workers. Idempotent; subsequent publishes fail with
  /// graph_shut_down.
  void shutdown();

  unsigned worker_count() const noexcept;

  // Typed convenience over the type-erased core.

  template <class T>
  void to_graph(const ChannelId& channel, std::shared_ptr<const T> value,
                std::string type_tag = {}) {
    to_graph(channel, Message::of(std::move(value), std::move(type_tag)));
  }

  template <class T>
  NodeId from_graph(const ChannelId& channel, InvokeType invoke,
                    std::function<void(std::shared_ptr<const T>)> cb) {
    return from_graph(channel, invoke,
                      wrap_typed<T>([cb = std::move(cb)](
                                        std::shared_ptr<const T> v,
                                        const Envelope&) { cb(std::move(v)); }));
  }

  template <class T>
  NodeId from_graph(
      const ChannelId& channel, InvokeType invoke,
      std::function<void(std::shared_ptr<const T>, const Envelope&)> cb) {
    return from_graph(channel, invoke, wrap_typed<T>(std::move(cb)));
  }

  /// Adapts a typed callback; messages of a different dynamic type are
  /// dropped with a warning instead of being misinterpreted.
  template <class T>
  static Callback wrap_typed(
      std::function<void(std::shared_ptr<const T>, const Envelope&)> cb) {
    return [cb = std::move(cb)](const Envelope& env) {
      if (auto v = env.message.as<T>()) {
        cb(std::move(v), env);
      } else {
        warn_type_drop(env);
      }
    };
  }

 private:
  static void warn_type_drop(const Envelope& env);

  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace graphbus
