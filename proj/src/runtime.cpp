#include "graphbus/runtime.hpp"

#include <random>

#include "graphbus/log.hpp"

namespace graphbus {
namespace {

std::uint64_t random_instance_id() {
  std::random_device rd;
  std::mt19937_64 gen((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
  std::uint64_t id = 0;
  while (id == 0) id = gen();
  return id;
}

}  // namespace

std::unique_ptr<Runtime> Runtime::init() { return init(RuntimeOptions{}); }

std::unique_ptr<Runtime> Runtime::init(
    const std::filesystem::path& config_dir) {
  RuntimeOptions options;
  options.config_dir = config_dir;
  return init(std::move(options));
}

std::unique_ptr<Runtime> Runtime::init(RuntimeOptions options) {
  std::unique_ptr<Runtime> rt(new Runtime());
  rt->instance_id_ = random_instance_id();

  if (options.config_dir) {
    auto params_path = *options.config_dir / kParamsFile;
    if (std::filesystem::exists(params_path)) {
      rt->params_ = ParameterStore::load(params_path);
    }
  }
  for (const auto& [key, text] : options.param_overrides) {
    rt->params_.set(key, parse_param_value(text));
  }

  rt->clock_.set_epoch_now();

  GraphRuntime::Options graph_options;
  if (options.workers != 0) {
    graph_options.workers = options.workers;
  } else if (auto workers = rt->params_.get_int(kWorkersParam)) {
    if (*workers < 1) {
      raise(Errc::config_parse,
            std::string(kWorkersParam) + " must be at least 1");
    }
    graph_options.workers = static_cast<unsigned>(*workers);
  }
  rt->graph_ = std::make_unique<GraphRuntime>(graph_options);

  rt->codecs_.register_codec(codecs::kBytesTag, typeid(ByteBuffer),
                             codecs::byte_buffer_identity(),
                             "builtin:byte-buffer-identity");

  rt->transforms_.load_from_params(rt->params_);

  if (options.config_dir) {
    auto net_path = *options.config_dir / kNetworkFile;
    if (std::filesystem::exists(net_path)) {
      rt->net_config_ = load_network_config(net_path);
    }
  }
  if (rt->net_config_.enabled()) {
    Runtime* self = rt.get();
    rt->bridge_ = std::make_unique<Bridge>(
        rt->net_config_,
        [self](std::string_view channel, std::span<const std::byte> data) {
          return self->dispatch_inbound(channel, data);
        },
        rt->instance_id_);
  }
  return rt;
}

Runtime::~Runtime() { shutdown(); }

void Runtime::shutdown() {
  if (bridge_) bridge_->stop();
  if (graph_) graph_->shutdown();
}

std::string Runtime::require_tag(std::type_index type) const {
  auto tag = codecs_.tag_for(type);
  if (!tag) {
    raise(Errc::missing_codec,
          std::string("no codec registered for payload type ") + type.name());
  }
  return *tag;
}

void Runtime::to_any(const ChannelId& channel, Message message) {
  const bool exported = bridge_ && bridge_->exports(channel.name());

  std::shared_ptr<const CodecRegistry::Entry> codec;
  if (exported) {
    // Resolve before local delivery so the message itself stays movable,
    // but surface missing codecs only after the local path has run.
    if (!message.type_tag.empty()) {
      codec = codecs_.find(message.type_tag);
    } else if (auto tag = codecs_.tag_for(message.type)) {
      message.type_tag = *tag;
      codec = codecs_.find(*tag);
    }
  }

  Message for_wire;
  if (exported) for_wire = message;
  graph_->to_graph(channel, std::move(message));

  if (!exported) return;
  if (!codec) {
    raise(Errc::missing_codec,
          "channel '" + channel.name() +
              "' is exported but the payload has no registered codec "
              "(local delivery already happened)");
  }
  Bytes data = codec->codec.serialize(for_wire);
  bridge_->publish_outbound(channel, data);
}

NodeId Runtime::from_any(const ChannelId& channel, InvokeType invoke,
                         const std::string& type_tag,
                         GraphRuntime::Callback cb) {
  auto entry = codecs_.find(type_tag);
  if (!entry) {
    raise(Errc::missing_codec,
          "from_any('" + channel.name() + "'): no codec for tag '" +
              type_tag + "'");
  }
  {
    std::unique_lock lock(bindings_mu_);
    auto it = binding_tags_.find(channel.name());
    if (it != binding_tags_.end() && it->second != type_tag) {
      raise(Errc::channel_codec_conflict,
            "channel '" + channel.name() + "' is already bound to tag '" +
                it->second + "', cannot bind '" + type_tag + "'");
    }
    binding_tags_[channel.name()] = type_tag;
    bindings_[channel.name()] = entry;
  }
  return graph_->from_graph(channel, invoke, std::move(cb));
}

Bridge::SinkResult Runtime::dispatch_inbound(std::string_view channel,
                                             std::span<const std::byte> data) {
  std::shared_ptr<const CodecRegistry::Entry> entry;
  {
    std::shared_lock lock(bindings_mu_);
    auto it = bindings_.find(std::string(channel));
    if (it == bindings_.end()) return Bridge::SinkResult::unrouted;
    entry = it->second;
  }
  Message message;
  try {
    message = entry->codec.deserialize(data);
  } catch (const std::exception& e) {
    log::debug("inbound payload on '" + std::string(channel) +
               "' failed to decode: " + e.what());
    return Bridge::SinkResult::decode_failed;
  }
  try {
    graph_->to_graph(ChannelId(channel), std::move(message));
  } catch (const Error&) {
    return Bridge::SinkResult::unrouted;  // racing shutdown
  }
  return Bridge::SinkResult::delivered;
}

BridgeStats Runtime::bridge_stats() const {
  if (!bridge_) return BridgeStats{};
  return bridge_->stats();
}

std::string Runtime::bound_endpoint() const {
  if (!bridge_) return {};
  return bridge_->bound_endpoint();
}

std::uint16_t Runtime::bound_port() const {
  if (!bridge_) return 0;
  return bridge_->bound_port();
}

}  // namespace graphbus
