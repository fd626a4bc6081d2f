#include "graphbus/errors.hpp"

namespace graphbus {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::ok: return "ok";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::invalid_channel: return "invalid_channel";
    case Errc::channel_too_long: return "channel_too_long";
    case Errc::payload_too_large: return "payload_too_large";
    case Errc::duplicate_codec: return "duplicate_codec";
    case Errc::missing_codec: return "missing_codec";
    case Errc::channel_codec_conflict: return "channel_codec_conflict";
    case Errc::graph_shut_down: return "graph_shut_down";
    case Errc::unknown_node: return "unknown_node";
    case Errc::config_parse: return "config_parse";
    case Errc::invalid_uri: return "invalid_uri";
    case Errc::bind_failure: return "bind_failure";
    case Errc::cycle: return "cycle";
    case Errc::reparent: return "reparent";
    case Errc::unknown_frame: return "unknown_frame";
    case Errc::disconnected_frames: return "disconnected_frames";
    case Errc::invalid_transform: return "invalid_transform";
    case Errc::not_found: return "not_found";
    case Errc::type_mismatch: return "type_mismatch";
    case Errc::peer_unreachable: return "peer_unreachable";
    case Errc::timeout: return "timeout";
    case Errc::io_error: return "io_error";
  }
  return "?";
}

}  // namespace graphbus
