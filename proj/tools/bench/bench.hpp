#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "report.hpp"

namespace bench {

enum class Mode { intra, ipc, tcp };

const char* mode_name(Mode mode);

/// Exit codes the CLI maps failures to.
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitPeerFailure = 3;

struct BenchError {
  int exit_code;
  std::string message;
};

struct Spec {
  Mode mode = Mode::intra;
  std::vector<std::uint64_t> sizes;
  int count = 100;
  int warmup = 10;
  double rate_hz = 10.0;  // pacing for throughput runs
  bool baseline_copy = false;
  std::uint64_t seed = 0x5eedbeef;  // payload generator seed
  int workers = 0;
  std::vector<std::pair<std::string, std::string>> params;

  // Cross-boundary runs. Empty strings mean "solo": the harness picks
  // loopback endpoints and spawns a receiver child process itself.
  std::string listen_uri;
  std::string peer_uri;
};

/// Sequential ping-pong per packet: publish, await the delivery (intra) or
/// the echo (ipc/tcp), record one latency sample. Intra latencies are
/// one-way; cross-boundary latencies are half the echo round trip.
/// Throws BenchError.
Result run_latency(const Spec& spec);

/// Same transport scaffolding, paced at spec.rate_hz. Per-size throughput is
/// total bytes over summed per-packet latency.
Result run_throughput(const Spec& spec);

/// Echo peer: subscribes the data channel, republishes every payload on the
/// echo channel, answers pings, and exits on the stop command (or when the
/// sender goes away for good). Blocks; returns a process exit code.
int run_receiver(const Spec& spec);

}  // namespace bench
