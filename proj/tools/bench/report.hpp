#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bench {

/// One measured packet.
struct Sample {
  std::uint64_t bytes = 0;
  std::int64_t latency_ns = 0;
};

/// Per-size summary row.
struct SizeRecord {
  std::string mode;  // intra | ipc | tcp
  std::uint64_t size_bytes = 0;
  int n = 0;
  double mean_us = 0;
  double median_us = 0;
  double p99_us = 0;
  double throughput_mbps = 0;  // MB = 1e6 bytes
};

struct Result {
  std::vector<SizeRecord> records;
};

/// Summarizes one size bucket. Throughput follows the total-over-total rule:
/// the sum of all transmitted bytes divided by the sum of the per-packet
/// latencies (so a single packet of S bytes at latency L reports exactly
/// S / L).
SizeRecord aggregate(const std::string& mode, std::uint64_t size_bytes,
                     const std::vector<Sample>& samples);

/// Column order is fixed:
/// mode,size_bytes,n,mean_us,median_us,p99_us,throughput_mbps
void write_csv(const Result& result, std::ostream& out);

/// parse_csv(write_csv(r)) == r, bit-exact on the floating-point fields.
Result parse_csv(std::istream& in);

/// Human-readable summary, including the latency convention note.
void write_table(const Result& result, std::ostream& out);

/// gnuplot-style whitespace-separated series with a # header.
void write_plot_data(const Result& result, std::ostream& out);

/// "1K,64K,1M" and doubling ranges "100K..10M" (suffixes B, K, M, G are
/// powers of 1024; the range endpoint is always included).
std::vector<std::uint64_t> parse_sizes(const std::string& spec);

std::string format_size(std::uint64_t bytes);

}  // namespace bench
