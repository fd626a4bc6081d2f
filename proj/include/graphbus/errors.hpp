#pragma once

#include <stdexcept>
#include <string>

namespace graphbus {

enum class Errc {
  ok = 0,
  invalid_argument,
  invalid_channel,
  channel_too_long,
  payload_too_large,
  duplicate_codec,
  missing_codec,
  channel_codec_conflict,
  graph_shut_down,
  unknown_node,
  config_parse,
  invalid_uri,
  bind_failure,
  cycle,
  reparent,
  unknown_frame,
  disconnected_frames,
  invalid_transform,
  not_found,
  type_mismatch,
  peer_unreachable,
  timeout,
  io_error,
};

const char* errc_name(Errc code) noexcept;

/// All failures surfaced by the library carry an Errc plus a human-readable
/// message. Expected per-frame outcomes (discards) are values, not errors.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace graphbus
