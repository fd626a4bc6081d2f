#include "graphbus/graphbus.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "graphbus/log.hpp"
#include "graphbus/runtime.hpp"
#include "graphbus/wire.hpp"

using graphbus::ByteBuffer;
using graphbus::Errc;
using graphbus::Error;
using graphbus::Runtime;

// gb_runtime aliases graphbus::Runtime and gb_buffer aliases
// graphbus::ByteBuffer; both stay incomplete on the C side.

namespace {

thread_local std::string tl_last_error = "ok";

gb_status map_errc(Errc code) {
  switch (code) {
    case Errc::ok: return GB_OK;
    case Errc::invalid_argument: return GB_ERR_INVALID_ARGUMENT;
    case Errc::invalid_channel: return GB_ERR_INVALID_CHANNEL;
    case Errc::channel_too_long: return GB_ERR_CHANNEL_TOO_LONG;
    case Errc::payload_too_large: return GB_ERR_PAYLOAD_TOO_LARGE;
    case Errc::duplicate_codec: return GB_ERR_DUPLICATE_CODEC;
    case Errc::missing_codec: return GB_ERR_MISSING_CODEC;
    case Errc::channel_codec_conflict: return GB_ERR_CHANNEL_CODEC_CONFLICT;
    case Errc::graph_shut_down: return GB_ERR_GRAPH_SHUT_DOWN;
    case Errc::unknown_node: return GB_ERR_UNKNOWN_NODE;
    case Errc::config_parse: return GB_ERR_CONFIG_PARSE;
    case Errc::invalid_uri: return GB_ERR_INVALID_URI;
    case Errc::bind_failure: return GB_ERR_BIND_FAILURE;
    case Errc::cycle: return GB_ERR_CYCLE;
    case Errc::reparent: return GB_ERR_REPARENT;
    case Errc::unknown_frame: return GB_ERR_UNKNOWN_FRAME;
    case Errc::disconnected_frames: return GB_ERR_DISCONNECTED_FRAMES;
    case Errc::invalid_transform: return GB_ERR_INVALID_TRANSFORM;
    case Errc::not_found: return GB_ERR_NOT_FOUND;
    case Errc::type_mismatch: return GB_ERR_TYPE_MISMATCH;
    case Errc::peer_unreachable: return GB_ERR_PEER_UNREACHABLE;
    case Errc::timeout: return GB_ERR_TIMEOUT;
    case Errc::io_error: return GB_ERR_IO;
  }
  return GB_ERR_INTERNAL;
}

gb_status fail(gb_status status, const char* message) {
  tl_last_error = message;
  return status;
}

template <class Fn>
gb_status guarded(Fn&& fn) {
  try {
    fn();
    return GB_OK;
  } catch (const Error& e) {
    tl_last_error = e.what();
    return map_errc(e.code());
  } catch (const std::exception& e) {
    tl_last_error = e.what();
    return GB_ERR_INTERNAL;
  } catch (...) {
    tl_last_error = "unknown failure";
    return GB_ERR_INTERNAL;
  }
}

Runtime* rt_cast(gb_runtime* rt) { return reinterpret_cast<Runtime*>(rt); }

const ByteBuffer* buf_cast(const gb_buffer* b) {
  return reinterpret_cast<const ByteBuffer*>(b);
}

gb_buffer* buf_cast(const ByteBuffer* b) {
  return reinterpret_cast<gb_buffer*>(const_cast<ByteBuffer*>(b));
}

graphbus::GraphRuntime::Callback wrap_c_callback(gb_message_fn fn,
                                                 void* user) {
  return [fn, user](const graphbus::Envelope& env) {
    auto payload = env.message.as<ByteBuffer>();
    if (!payload) {
      graphbus::log::warn("channel '" + env.channel.name() +
                          "' carries a non-buffer payload; C subscriber "
                          "skipped");
      return;
    }
    fn(user, env.channel.name().c_str(), env.sequence,
       buf_cast(payload.get()));
  };
}

const char* tag_or_bytes(const char* tag) {
  return tag != nullptr ? tag : graphbus::codecs::kBytesTag;
}

}  // namespace

struct gb_options {
  graphbus::RuntimeOptions options;
};

extern "C" {

const char* gb_status_name(gb_status status) {
  switch (status) {
    case GB_OK: return "GB_OK";
    case GB_ERR_INVALID_ARGUMENT: return "GB_ERR_INVALID_ARGUMENT";
    case GB_ERR_INVALID_CHANNEL: return "GB_ERR_INVALID_CHANNEL";
    case GB_ERR_CHANNEL_TOO_LONG: return "GB_ERR_CHANNEL_TOO_LONG";
    case GB_ERR_PAYLOAD_TOO_LARGE: return "GB_ERR_PAYLOAD_TOO_LARGE";
    case GB_ERR_DUPLICATE_CODEC: return "GB_ERR_DUPLICATE_CODEC";
    case GB_ERR_MISSING_CODEC: return "GB_ERR_MISSING_CODEC";
    case GB_ERR_CHANNEL_CODEC_CONFLICT:
      return "GB_ERR_CHANNEL_CODEC_CONFLICT";
    case GB_ERR_GRAPH_SHUT_DOWN: return "GB_ERR_GRAPH_SHUT_DOWN";
    case GB_ERR_UNKNOWN_NODE: return "GB_ERR_UNKNOWN_NODE";
    case GB_ERR_CONFIG_PARSE: return "GB_ERR_CONFIG_PARSE";
    case GB_ERR_INVALID_URI: return "GB_ERR_INVALID_URI";
    case GB_ERR_BIND_FAILURE: return "GB_ERR_BIND_FAILURE";
    case GB_ERR_CYCLE: return "GB_ERR_CYCLE";
    case GB_ERR_REPARENT: return "GB_ERR_REPARENT";
    case GB_ERR_UNKNOWN_FRAME: return "GB_ERR_UNKNOWN_FRAME";
    case GB_ERR_DISCONNECTED_FRAMES: return "GB_ERR_DISCONNECTED_FRAMES";
    case GB_ERR_INVALID_TRANSFORM: return "GB_ERR_INVALID_TRANSFORM";
    case GB_ERR_NOT_FOUND: return "GB_ERR_NOT_FOUND";
    case GB_ERR_TYPE_MISMATCH: return "GB_ERR_TYPE_MISMATCH";
    case GB_ERR_PEER_UNREACHABLE: return "GB_ERR_PEER_UNREACHABLE";
    case GB_ERR_TIMEOUT: return "GB_ERR_TIMEOUT";
    case GB_ERR_IO: return "GB_ERR_IO";
    case GB_ERR_INTERNAL: return "GB_ERR_INTERNAL";
  }
  return "?";
}

const char* gb_last_error(void) { return tl_last_error.c_str(); }

/* ---- options ---- */

gb_options* gb_options_new(void) { return new gb_options{}; }

void gb_options_free(gb_options* options) { delete options; }

gb_status gb_options_set_config_dir(gb_options* options, const char* path) {
  if (!options || !path) return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  options->options.config_dir = std::filesystem::path(path);
  return GB_OK;
}

gb_status gb_options_set_param(gb_options* options, const char* key,
                               const char* value) {
  if (!options || !key || !value) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  options->options.param_overrides.emplace_back(key, value);
  return GB_OK;
}

gb_status gb_options_set_workers(gb_options* options, unsigned workers) {
  if (!options) return fail(GB_ERR_INVALID_ARGUMENT, "null options");
  options->options.workers = workers;
  return GB_OK;
}

/* ---- runtime ---- */

gb_status gb_runtime_new(const gb_options* options, gb_runtime** out) {
  if (!out) return fail(GB_ERR_INVALID_ARGUMENT, "null out pointer");
  *out = nullptr;
  return guarded([&] {
    auto rt = options ? Runtime::init(options->options)
                      : Runtime::init(graphbus::RuntimeOptions{});
    *out = reinterpret_cast<gb_runtime*>(rt.release());
  });
}

void gb_runtime_free(gb_runtime* rt) {
  if (!rt) return;
  delete rt_cast(rt);
}

gb_status gb_runtime_shutdown(gb_runtime* rt) {
  if (!rt) return fail(GB_ERR_INVALID_ARGUMENT, "null runtime");
  return guarded([&] { rt_cast(rt)->shutdown(); });
}

int gb_wait_idle(gb_runtime* rt, uint64_t timeout_ms) {
  if (!rt) return 0;
  return rt_cast(rt)->wait_idle(std::chrono::milliseconds(timeout_ms)) ? 1 : 0;
}

uint64_t gb_instance_id(gb_runtime* rt) {
  return rt ? rt_cast(rt)->instance_id() : 0;
}

/* ---- buffers ---- */

gb_buffer* gb_buffer_new(const void* data, size_t size) {
  graphbus::Bytes bytes(size);
  if (size > 0 && data != nullptr) std::memcpy(bytes.data(), data, size);
  return buf_cast(ByteBuffer::create(std::move(bytes)));
}

gb_buffer* gb_buffer_ref(const gb_buffer* buffer) {
  if (buffer) buf_cast(buffer)->ref();
  return const_cast<gb_buffer*>(buffer);
}

void gb_buffer_unref(const gb_buffer* buffer) {
  if (buffer) buf_cast(buffer)->unref();
}

const void* gb_buffer_data(const gb_buffer* buffer) {
  return buffer ? buf_cast(buffer)->data() : nullptr;
}

size_t gb_buffer_size(const gb_buffer* buffer) {
  return buffer ? buf_cast(buffer)->size() : 0;
}

/* ---- publish / subscribe ---- */

gb_status gb_to_any(gb_runtime* rt, const char* channel, gb_buffer* payload,
                    const char* type_tag) {
  if (!rt || !channel || !payload) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    graphbus::Message m = graphbus::Message::of(
        ByteBuffer::share(buf_cast(payload)), tag_or_bytes(type_tag));
    rt_cast(rt)->to_any(graphbus::ChannelId(channel), std::move(m));
  });
}

gb_status gb_to_graph(gb_runtime* rt, const char* channel,
                      gb_buffer* payload) {
  if (!rt || !channel || !payload) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    graphbus::Message m = graphbus::Message::of(
        ByteBuffer::share(buf_cast(payload)), graphbus::codecs::kBytesTag);
    rt_cast(rt)->to_graph(graphbus::ChannelId(channel), std::move(m));
  });
}

gb_status gb_from_any(gb_runtime* rt, const char* channel, gb_invoke invoke,
                      const char* type_tag, gb_message_fn fn, void* user,
                      gb_node* out_node) {
  if (!rt || !channel || !fn) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    graphbus::NodeId id = rt_cast(rt)->from_any(
        graphbus::ChannelId(channel),
        invoke == GB_INVOKE_SERIAL ? graphbus::InvokeType::serial
                                   : graphbus::InvokeType::concurrent,
        tag_or_bytes(type_tag), wrap_c_callback(fn, user));
    if (out_node) *out_node = id.value();
  });
}

gb_status gb_from_graph(gb_runtime* rt, const char* channel, gb_invoke invoke,
                        gb_message_fn fn, void* user, gb_node* out_node) {
  if (!rt || !channel || !fn) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    graphbus::NodeId id = rt_cast(rt)->from_graph(
        graphbus::ChannelId(channel),
        invoke == GB_INVOKE_SERIAL ? graphbus::InvokeType::serial
                                   : graphbus::InvokeType::concurrent,
        wrap_c_callback(fn, user));
    if (out_node) *out_node = id.value();
  });
}

gb_status gb_deregister(gb_runtime* rt, gb_node node) {
  if (!rt) return fail(GB_ERR_INVALID_ARGUMENT, "null runtime");
  return guarded([&] { rt_cast(rt)->deregister(graphbus::NodeId(node)); });
}

/* ---- codecs ---- */

gb_status gb_register_codec(gb_runtime* rt, const char* type_tag,
                            gb_encode_fn encode, gb_decode_fn decode,
                            void* user) {
  if (!rt || !type_tag || !encode || !decode) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    std::string tag(type_tag);
    graphbus::Codec codec;
    codec.serialize = [encode, user](const graphbus::Message& m) {
      auto p = m.as<ByteBuffer>();
      if (!p) {
        graphbus::raise(Errc::type_mismatch,
                        "C codec expects a buffer payload");
      }
      gb_buffer* wire = encode(user, buf_cast(p.get()));
      if (!wire) {
        graphbus::raise(Errc::io_error, "C codec encode returned NULL");
      }
      graphbus::Bytes out = buf_cast(wire)->bytes();
      buf_cast(wire)->unref();
      return out;
    };
    codec.deserialize = [decode, user,
                         tag](std::span<const std::byte> d) {
      gb_buffer* value = decode(user, d.data(), d.size());
      if (!value) {
        graphbus::raise(Errc::io_error, "C codec decode returned NULL");
      }
      auto shared = ByteBuffer::share(buf_cast(value));
      buf_cast(value)->unref();  // share() took its own reference
      return graphbus::Message::of(std::move(shared), tag);
    };
    // Identity: the function pointers plus the user cookie.
    char ident[96];
    std::snprintf(ident, sizeof(ident), "c:%p:%p:%p",
                  reinterpret_cast<void*>(encode),
                  reinterpret_cast<void*>(decode), user);
    rt_cast(rt)->register_codec(tag, typeid(ByteBuffer), std::move(codec),
                                ident);
  });
}

/* ---- wire ---- */

gb_status gb_wire_pack(const char* channel, const void* data, size_t size,
                       uint8_t** out, size_t* out_size) {
  if (!channel || !out || !out_size || (size > 0 && !data)) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  *out_size = 0;
  return guarded([&] {
    auto frame = graphbus::wire::pack(
        graphbus::ChannelId(channel),
        std::span(static_cast<const std::byte*>(data), size));
    auto* raw = static_cast<uint8_t*>(std::malloc(frame.size()));
    if (!raw) graphbus::raise(Errc::io_error, "out of memory");
    if (!frame.empty()) std::memcpy(raw, frame.data(), frame.size());
    *out = raw;
    *out_size = frame.size();
  });
}

gb_frame_result gb_wire_unpack(const uint8_t* frame, size_t size,
                               char channel_out[256],
                               const uint8_t** data_out, size_t* data_size) {
  if (channel_out) channel_out[0] = '\0';
  if (data_out) *data_out = nullptr;
  if (data_size) *data_size = 0;
  if (!frame && size > 0) return GB_FRAME_TRUNCATED_HEADER;
  auto outcome = graphbus::wire::unpack(
      std::span(reinterpret_cast<const std::byte*>(frame), size));
  if (auto* reason = std::get_if<graphbus::wire::DiscardReason>(&outcome)) {
    switch (*reason) {
      case graphbus::wire::DiscardReason::truncated_header:
        return GB_FRAME_TRUNCATED_HEADER;
      case graphbus::wire::DiscardReason::bad_separator:
        return GB_FRAME_BAD_SEPARATOR;
      case graphbus::wire::DiscardReason::bad_utf8:
        return GB_FRAME_BAD_UTF8;
      case graphbus::wire::DiscardReason::bad_channel:
        return GB_FRAME_BAD_CHANNEL;
    }
  }
  const auto& ok = std::get<graphbus::wire::Unpacked>(outcome);
  if (channel_out) {
    std::memcpy(channel_out, ok.channel.data(), ok.channel.size());
    channel_out[ok.channel.size()] = '\0';
  }
  if (data_out) {
    *data_out = reinterpret_cast<const uint8_t*>(ok.payload.data());
  }
  if (data_size) *data_size = ok.payload.size();
  return GB_FRAME_OK;
}

void gb_free(void* p) { std::free(p); }

/* ---- bridge stats ---- */

int gb_bridge_enabled(gb_runtime* rt) {
  return (rt && rt_cast(rt)->bridge_enabled()) ? 1 : 0;
}

gb_status gb_get_bridge_stats(gb_runtime* rt, gb_bridge_stats* out) {
  if (!rt || !out) return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  graphbus::BridgeStats s = rt_cast(rt)->bridge_stats();
  out->frames_sent = s.frames_sent;
  out->frames_received = s.frames_received;
  out->frames_discarded = s.frames_discarded;
  out->frames_unrouted = s.frames_unrouted;
  out->bytes_sent = s.bytes_sent;
  out->bytes_received = s.bytes_received;
  out->frames_dropped_backpressure = s.frames_dropped_backpressure;
  out->publisher_peers = s.publisher_peers;
  out->subscriber_links = s.subscriber_links;
  return GB_OK;
}

gb_status gb_bound_endpoint(gb_runtime* rt, char* out, size_t out_size) {
  if (!rt || !out || out_size == 0) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  std::string text = rt_cast(rt)->bound_endpoint();
  if (text.size() + 1 > out_size) {
    return fail(GB_ERR_INVALID_ARGUMENT, "output buffer too small");
  }
  std::memcpy(out, text.c_str(), text.size() + 1);
  return GB_OK;
}

/* ---- time ---- */

int64_t gb_now_ns(gb_runtime* rt) {
  return rt ? rt_cast(rt)->clock().now_ns() : 0;
}

gb_status gb_set_epoch_now(gb_runtime* rt) {
  if (!rt) return fail(GB_ERR_INVALID_ARGUMENT, "null runtime");
  rt_cast(rt)->clock().set_epoch_now();
  return GB_OK;
}

/* ---- params ---- */

gb_status gb_param_get_int(gb_runtime* rt, const char* key, int64_t* out) {
  if (!rt || !key || !out) return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto v = rt_cast(rt)->params().get_int(key);
    if (!v) graphbus::raise(Errc::not_found, std::string("no parameter ") + key);
    *out = *v;
  });
}

gb_status gb_param_get_double(gb_runtime* rt, const char* key, double* out) {
  if (!rt || !key || !out) return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto v = rt_cast(rt)->params().get_double(key);
    if (!v) graphbus::raise(Errc::not_found, std::string("no parameter ") + key);
    *out = *v;
  });
}

gb_status gb_param_get_bool(gb_runtime* rt, const char* key, int* out) {
  if (!rt || !key || !out) return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto v = rt_cast(rt)->params().get_bool(key);
    if (!v) graphbus::raise(Errc::not_found, std::string("no parameter ") + key);
    *out = *v ? 1 : 0;
  });
}

gb_status gb_param_get_string(gb_runtime* rt, const char* key, char* out,
                              size_t out_size) {
  if (!rt || !key || !out || out_size == 0) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto v = rt_cast(rt)->params().get_string(key);
    if (!v) graphbus::raise(Errc::not_found, std::string("no parameter ") + key);
    if (v->size() + 1 > out_size) {
      graphbus::raise(Errc::invalid_argument, "output buffer too small");
    }
    std::memcpy(out, v->c_str(), v->size() + 1);
  });
}

gb_status gb_param_set_int(gb_runtime* rt, const char* key, int64_t value) {
  if (!rt || !key) return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { rt_cast(rt)->params().set(key, value); });
}

gb_status gb_param_set_double(gb_runtime* rt, const char* key, double value) {
  if (!rt || !key) return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { rt_cast(rt)->params().set(key, value); });
}

gb_status gb_param_set_bool(gb_runtime* rt, const char* key, int value) {
  if (!rt || !key) return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { rt_cast(rt)->params().set(key, value != 0); });
}

gb_status gb_param_set_string(gb_runtime* rt, const char* key,
                              const char* value) {
  if (!rt || !key || !value) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { rt_cast(rt)->params().set(key, std::string(value)); });
}

gb_status gb_param_set_yaml(gb_runtime* rt, const char* key,
                            const char* value) {
  if (!rt || !key || !value) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded(
      [&] { rt_cast(rt)->params().set(key, graphbus::parse_param_value(value)); });
}

uint64_t gb_param_generation(gb_runtime* rt) {
  return rt ? rt_cast(rt)->params().generation() : 0;
}

/* ---- transforms ---- */

gb_status gb_tf_set(gb_runtime* rt, const char* parent, const char* child,
                    const double matrix[16]) {
  if (!rt || !parent || !child || !matrix) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    rt_cast(rt)->transforms().set_transform(
        parent, child, graphbus::RigidTransform::from_row_major(matrix));
  });
}

gb_status gb_tf_lookup(gb_runtime* rt, const char* src, const char* dst,
                       double out_matrix[16]) {
  if (!rt || !src || !dst || !out_matrix) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    rt_cast(rt)->transforms().lookup(src, dst).to_row_major(out_matrix);
  });
}

gb_status gb_tf_lca(gb_runtime* rt, const char* a, const char* b,
                    char out_frame[256]) {
  if (!rt || !a || !b || !out_frame) {
    return fail(GB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    std::string name = rt_cast(rt)->transforms().lowest_common_ancestor(a, b);
    std::memcpy(out_frame, name.c_str(), name.size() + 1);
  });
}

} /* extern "C" */
