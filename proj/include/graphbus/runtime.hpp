#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphbus/bridge.hpp"
#include "graphbus/codec.hpp"
#include "graphbus/data_graph.hpp"
#include "graphbus/net_config.hpp"
#include "graphbus/params.hpp"
#include "graphbus/time_system.hpp"
#include "graphbus/transform_tree.hpp"

namespace graphbus {

struct RuntimeOptions {
  /// Directory holding the optional network_setting.yaml and params.yaml.
  std::optional<std::filesystem::path> config_dir;

  /// Applied on top of params.yaml before anything reads them
  /// (key, value-in-config-syntax) — what a CLI --param flag carries.
  std::vector<std::pair<std::string, std::string>> param_overrides;

  /// Worker-count precedence: this field when non-zero, else the
  /// data_graph.workers parameter, else hardware parallelism.
  unsigned workers = 0;
};

/// One process-wide context: the local graph, the optional network bridge,
/// the codec registry, parameters, the clock and the frame tree.
///
/// to_any/from_any are the only pub/sub calls an application needs; whether
/// a channel stays in-process or also crosses the network is decided by the
/// config files alone.
class Runtime {
 public:
  static constexpr const char* kNetworkFile = "network_setting.yaml";
  static constexpr const char* kParamsFile = "params.yaml";
  static constexpr const char* kWorkersParam = "data_graph.workers";

  /// Composes and starts everything: parameters loaded, clock epoch set,
  /// graph running, bridge bound iff the network config asks for one, frame
  /// tree loaded from the `transforms` parameter. An empty or absent config
  /// directory yields a pure intra-process runtime.
  /// Throws Error(config_parse/invalid_uri/bind_failure).
  static std::unique_ptr<Runtime> init(RuntimeOptions options);
  static std::unique_ptr<Runtime> init(const std::filesystem::path& config_dir);
  static std::unique_ptr<Runtime> init();

  ~Runtime();

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  // ---- unified publish/subscribe ----

  /// Delivers to the local graph always (by reference, no serialization);
  /// iff the channel is listed under the publisher config, additionally
  /// serializes once through the message's codec and ships the frame.
  /// Throws Error(missing_codec) when the channel is exported and no codec
  /// matches — after local delivery has already happened.
  void to_any(const ChannelId& channel, Message message);

  template <class T>
  void to_any(const ChannelId& channel, std::shared_ptr<const T> value) {
    Message m = Message::of(std::move(value));
    if (auto tag = codecs_.tag_for(m.type)) m.type_tag = *tag;
    to_any(channel, std::move(m));
  }

  /// Registers a subscriber and binds the channel to `type_tag` so inbound
  /// network frames know their codec. One payload type per channel:
  /// a second binding with a different tag throws
  /// Error(channel_codec_conflict); an unknown tag throws
  /// Error(missing_codec).
  NodeId from_any(const ChannelId& channel, InvokeType invoke,
                  const std::string& type_tag, GraphRuntime::Callback cb);

  template <class T>
  NodeId from_any(const ChannelId& channel, InvokeType invoke,
                  std::function<void(std::shared_ptr<const T>)> cb) {
    return from_any(channel, invoke, require_tag(typeid(T)),
                    GraphRuntime::wrap_typed<T>(
                        [cb = std::move(cb)](std::shared_ptr<const T> v,
                                             const Envelope&) {
                          cb(std::move(v));
                        }));
  }

  template <class T>
  NodeId from_any(
      const ChannelId& channel, InvokeType invoke,
      std::function<void(std::shared_ptr<const T>, const Envelope&)> cb) {
    return from_any(channel, invoke, require_tag(typeid(T)),
                    GraphRuntime::wrap_typed<T>(std::move(cb)));
  }

  // ---- intra-process only (no codec required) ----

  void to_graph(const ChannelId& channel, Message message) {
    graph_->to_graph(channel, std::move(message));
  }

  template <class T>
  void to_graph(const ChannelId& channel, std::shared_ptr<const T> value) {
    graph_->to_graph<T>(channel, std::move(value));
  }

  NodeId from_graph(const ChannelId& channel, InvokeType invoke,
                    GraphRuntime::Callback cb) {
    return graph_->from_graph(channel, invoke, std::move(cb));
  }

  template <class T>
  NodeId from_graph(const ChannelId& channel, InvokeType invoke,
                    std::function<void(std::shared_ptr<const T>)> cb) {
    return graph_->from_graph<T>(channel, invoke, std::move(cb));
  }

  void deregister(NodeId node) { graph_->deregister(node); }
  bool wait_idle(std::chrono::nanoseconds timeout) {
    return graph_->wait_idle(timeout);
  }

  /// Stops the bridge, then drains and stops the graph. Idempotent.
  void shutdown();

  // ---- codecs ----

  void register_codec(const std::string& type_tag, std::type_index type,
                      Codec codec, std::string identity) {
    codecs_.register_codec(type_tag, type, std::move(codec),
                           std::move(identity));
  }

  template <class T>
  void register_codec(const std::string& type_tag,
                      std::function<Bytes(const T&)> ser,
                      std::function<T(std::span<const std::byte>)> de) {
    codecs_.register_typed<T>(type_tag, std::move(ser), std::move(de));
  }

  CodecRegistry& codecs() noexcept { return codecs_; }

  // ---- components ----

  GraphRuntime& graph() noexcept { return *graph_; }
  ParameterStore& params() noexcept { return params_; }
  TimeSystem& clock() noexcept { return clock_; }
  FrameTree& transforms() noexcept { return transforms_; }

  bool bridge_enabled() const noexcept { return bridge_ != nullptr; }
  BridgeStats bridge_stats() const;
  std::string bound_endpoint() const;
  std::uint16_t bound_port() const;

  std::uint64_t instance_id() const noexcept { return instance_id_; }
  const NetworkConfig& network_config() const noexcept { return net_config_; }

 private:
  Runtime() = default;

  std::string require_tag(std::type_index type) const;
  Bridge::SinkResult dispatch_inbound(std::string_view channel,
                                      std::span<const std::byte> data);

  std::uint64_t instance_id_ = 0;
  ParameterStore params_;
  TimeSystem clock_;
  CodecRegistry codecs_;
  FrameTree transforms_;
  std::unique_ptr<GraphRuntime> graph_;
  NetworkConfig net_config_;
  std::unique_ptr<Bridge> bridge_;

  mutable std::shared_mutex bindings_mu_;
  std::unordered_map<std::string, std::shared_ptr<const CodecRegistry::Entry>>
      bindings_;
  std::unordered_map<std::string, std::string> binding_tags_;
};

}  // namespace graphbus
