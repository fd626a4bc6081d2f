#include "graphbus/data_graph.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <optional>
#include <thread>
#include <unordered_map>
#include <vector>

#include "graphbus/log.hpp"
#include "task_pool.hpp"

namespace graphbus {
namespace {

struct Node {
  std::uint64_t id = 0;
  InvokeType invoke = InvokeType::serial;
  GraphRuntime::Callback callback;

  std::mutex mu;
  std::condition_variable cv;       // running/draining transitions
  std::deque<Envelope> queue;       // serial mode only
  bool draining = false;
  bool alive = true;
  int running = 0;
  bool watermark_warned = false;
};

thread_local const Node* tl_current_node = nullptr;

}  // namespace

struct GraphRuntime::Impl {
  Options options;
  detail::TaskPool pool;

  std::shared_mutex registry_mu;
  std::unordered_map<std::string, std::vector<std::shared_ptr<Node>>>
      by_channel;
  std::unordered_map<std::uint64_t, std::shared_ptr<Node>> by_id;
  std::atomic<std::uint64_t> next_node_id{1};

  std::mutex seq_mu;
  std::unordered_map<std::string, std::uint64_t> sequence_by_channel;

  // Publishers hold the gate shared for the whole enqueue; shutdown flips
  // `stopping` under the exclusive side, so no publish can straddle it.
  std::shared_mutex stop_gate;
  bool stopping = false;
  std::atomic<bool> cancel_concurrent{false};

  std::mutex idle_mu;
  std::condition_variable idle_cv;
  std::atomic<std::int64_t> pending{0};

  explicit Impl(Options opts)
      : options(opts),
        pool(opts.workers != 0 ? opts.workers
                               : std::max(1u, std::thread::hardware_concurrency())) {}

  void pending_add(std::int64_t n) {
    pending.fetch_add(n, std::memory_order_relaxed);
  }

  void pending_sub(std::int64_t n) {
    if (pending.fetch_sub(n, std::memory_order_acq_rel) == n) {
      std::lock_guard lock(idle_mu);
      idle_cv.notify_all();
    }
  }

  void run_callback(const std::shared_ptr<Node>& node, const Envelope& env) {
    tl_current_node = node.get();
    try {
      node->callback(env);
    } catch (const std::exception& e) {
      log::warn("callback on channel '" + env.channel.name() +
                "' threw: " + e.what() + " (message dropped, node kept)");
    } catch (...) {
      log::warn("callback on channel '" + env.channel.name() +
                "' threw a non-exception value (message dropped, node kept)");
    }
    tl_current_node = nullptr;
  }

  void drain_serial(std::shared_ptr<Node> node) {
    for (;;) {
      std::optional<Envelope> env;
      {
        std::unique_lock lock(node->mu);
        if (node->queue.empty() || !node->alive) {
          node->draining = false;
          lock.unlock();
          node->cv.notify_all();
          return;
        }
        env.emplace(std::move(node->queue.front()));
        node->queue.pop_front();
        node->running = 1;
      }
      run_callback(node, *env);
      {
        std::lock_guard lock(node->mu);
        node->running = 0;
      }
      node->cv.notify_all();
      pending_sub(1);
    }
  }

  void spawn_concurrent(std::shared_ptr<Node> node, Envelope env) {
    pool.submit([this, node = std::move(node), env = std::move(env)]() mutable {
      bool start = false;
      {
        std::lock_guard lock(node->mu);
        if (node->alive && !cancel_concurrent.load(std::memory_order_relaxed)) {
          ++node->running;
          start = true;
        }
      }
      if (start) {
        run_callback(node, env);
        {
          std::lock_guard lock(node->mu);
          --node->running;
        }
        node->cv.notify_all();
      }
      pending_sub(1);
    });
  }
};

GraphRuntime::GraphRuntime(Options options)
    : impl_(std::make_unique<Impl>(options)) {}

GraphRuntime::~GraphRuntime() { shutdown(); }

unsigned GraphRuntime::worker_count() const noexcept {
  return impl_->pool.worker_count();
}

void GraphRuntime::warn_type_drop(const Envelope& env) {
  log::warn("message on channel '" + env.channel.name() +
            "' has an unexpected payload type; dropped by typed subscriber");
}

void GraphRuntime::to_graph(const ChannelId& channel, Message message) {
  Impl& im = *impl_;
  std::shared_lock gate(im.stop_gate);
  if (im.stopping) {
    raise(Errc::graph_shut_down, "to_graph after shutdown");
  }

  Envelope env{channel, std::move(message), 0};
  {
    std::lock_guard lock(im.seq_mu);
    env.sequence = ++im.sequence_by_channel[channel.name()];
  }

  // Snapshot the recipient set; nodes registered after this point do not
  // receive the envelope.
  std::vector<std::shared_ptr<Node>> recipients;
  {
    std::shared_lock lock(im.registry_mu);
    auto it = im.by_channel.find(channel.name());
    if (it != im.by_channel.end()) recipients = it->second;
  }

  for (auto& node : recipients) {
    im.pending_add(1);
    if (node->invoke == InvokeType::serial) {
      bool spawn = false;
      bool delivered = false;
      {
        std::lock_guard lock(node->mu);
        if (node->alive) {
          node->queue.push_back(env);
          delivered = true;
          if (node->queue.size() > im.options.queue_warn_watermark &&
              !node->watermark_warned) {
            node->watermark_warned = true;
            log::warn("serial node on channel '" + channel.name() +
                      "' exceeded " +
                      std::to_string(im.options.queue_warn_watermark) +
                      " queued messages");
          }
          if (!node->draining) {
            node->draining = true;
            spawn = true;
          }
        }
      }
      if (!delivered) {
        im.pending_sub(1);
      } else if (spawn) {
        im.pool.submit([&im, node] { im.drain_serial(node); });
      }
    } else {
      im.spawn_concurrent(node, env);
    }
  }
}

NodeId GraphRuntime::from_graph(const ChannelId& channel, InvokeType invoke,
                                Callback cb) {
  Impl& im = *impl_;
  std::shared_lock gate(im.stop_gate);
  if (im.stopping) {
    raise(Errc::graph_shut_down, "from_graph after shutdown");
  }
  auto node = std::make_shared<Node>();
  node->id = im.next_node_id.fetch_add(1);
  node->invoke = invoke;
  node->callback = std::move(cb);
  {
    std::unique_lock lock(im.registry_mu);
    im.by_channel[channel.name()].push_back(node);
    im.by_id.emplace(node->id, node);
  }
  return NodeId(node->id);
}

void GraphRuntime::deregister(NodeId id) {
  Impl& im = *impl_;
  {
    std::shared_lock gate(im.stop_gate);
    if (im.stopping) return;  // shutdown already stops all delivery
  }

  std::shared_ptr<Node> node;
  {
    std::unique_lock lock(im.registry_mu);
    auto it = im.by_id.find(id.value());
    if (it == im.by_id.end()) {
      raise(Errc::unknown_node,
            "deregister: unknown node handle " + std::to_string(id.value()));
    }
    node = it->second;
    im.by_id.erase(it);
    for (auto& [channel, nodes] : im.by_channel) {
      std::erase(nodes, node);
    }
  }

  std::size_t dropped = 0;
  {
    std::lock_guard lock(node->mu);
    node->alive = false;
    dropped = node->queue.size();
    node->queue.clear();
  }
  if (dropped > 0) im.pending_sub(static_cast<std::int64_t>(dropped));

  if (tl_current_node == node.get()) {
    return;  // called from inside the node's own callback; cannot wait on self
  }
  std::unique_lock lock(node->mu);
  node->cv.wait(lock, [&] { return node->running == 0 && !node->draining; });
}

bool GraphRuntime::wait_idle(std::chrono::nanoseconds timeout) {
  Impl& im = *impl_;
  std::unique_lock lock(im.idle_mu);
  return im.idle_cv.wait_for(lock, timeout, [&] {
    return im.pending.load(std::memory_order_acquire) == 0;
  });
}

void GraphRuntime::shutdown() {
  Impl& im = *impl_;
  {
    std::unique_lock gate(im.stop_gate);
    if (im.stopping) return;
    im.stopping = true;
  }
  im.cancel_concurrent.store(true);

  // Serial queues drain to completion; cancelled concurrent tasks fall
  // through and only decrement the pending count.
  {
    std::unique_lock lock(im.idle_mu);
    im.idle_cv.wait(lock, [&] {
      return im.pending.load(std::memory_order_acquire) == 0;
    });
  }
  im.pool.stop_and_join();
  {
    std::unique_lock lock(im.registry_mu);
    im.by_channel.clear();
    im.by_id.clear();
  }
}

}  // namespace graphbus
