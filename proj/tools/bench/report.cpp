#include "report.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bench {
namespace {

constexpr const char* kCsvHeader =
    "mode,size_bytes,n,mean_us,median_us,p99_us,throughput_mbps";

constexpr const char* kConventionNote =
    "latency convention: one-way for intra mode, half of the echo round "
    "trip for ipc/tcp modes";

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SizeRecord aggregate(const std::string& mode, std::uint64_t size_bytes,
                     const std::vector<Sample>& samples) {
  SizeRecord rec;
  rec.mode = mode;
  rec.size_bytes = size_bytes;
  rec.n = static_cast<int>(samples.size());
  if (samples.empty()) return rec;

  std::uint64_t total_bytes = 0;
  std::int64_t total_ns = 0;
  std::vector<std::int64_t> sorted;
  sorted.reserve(samples.size());
  for (const Sample& s : samples) {
    total_bytes += s.bytes;
    total_ns += s.latency_ns;
    sorted.push_back(s.latency_ns);
  }
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  rec.mean_us = static_cast<double>(total_ns) / static_cast<double>(n) / 1e3;
  if (n % 2 == 1) {
    rec.median_us = static_cast<double>(sorted[n / 2]) / 1e3;
  } else {
    rec.median_us = (static_cast<double>(sorted[n / 2 - 1]) +
                     static_cast<double>(sorted[n / 2])) /
                    2.0 / 1e3;
  }
  std::size_t p99_index = (99 * n + 99) / 100;  // ceil(0.99 n)
  if (p99_index == 0) p99_index = 1;
  rec.p99_us = static_cast<double>(sorted[p99_index - 1]) / 1e3;

  // Total transmitted data over the summed per-packet transmission time.
  rec.throughput_mbps = static_cast<double>(total_bytes) /
                        (static_cast<double>(total_ns) * 1e-9) / 1e6;
  return rec;
}

void write_csv(const Result& result, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const SizeRecord& r : result.records) {
    out << r.mode << ',' << r.size_bytes << ',' << r.n << ','
        << fmt_double(r.mean_us) << ',' << fmt_double(r.median_us) << ','
        << fmt_double(r.p99_us) << ',' << fmt_double(r.throughput_mbps)
        << "\n";
  }
}

Result parse_csv(std::istream& in) {
  Result result;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) {
        throw std::runtime_error("unexpected csv header: " + line);
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string field;
    SizeRecord r;
    std::getline(row, r.mode, ',');
    std::getline(row, field, ',');
    r.size_bytes = std::stoull(field);
    std::getline(row, field, ',');
    r.n = std::stoi(field);
    std::getline(row, field, ',');
    r.mean_us = std::stod(field);
    std::getline(row, field, ',');
    r.median_us = std::stod(field);
    std::getline(row, field, ',');
    r.p99_us = std::stod(field);
    std::getline(row, field, ',');
    r.throughput_mbps = std::stod(field);
    result.records.push_back(std::move(r));
  }
  if (!header_seen) throw std::runtime_error("empty csv");
  return result;
}

void write_table(const Result& result, std::ostream& out) {
  out << "# " << kConventionNote << "\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-6s %12s %6s %12s %12s %12s %14s\n",
                "mode", "size", "n", "mean_us", "median_us", "p99_us",
                "MB_per_s");
  out << buf;
  for (const SizeRecord& r : result.records) {
    std::snprintf(buf, sizeof(buf),
                  "%-6s %12s %6d %12.1f %12.1f %12.1f %14.1f\n",
                  r.mode.c_str(), format_size(r.size_bytes).c_str(), r.n,
                  r.mean_us, r.median_us, r.p99_us, r.throughput_mbps);
    out << buf;
  }
}

void write_plot_data(const Result& result, std::ostream& out) {
  out << "# " << kConventionNote << "\n";
  out << "# mode size_bytes n mean_us median_us p99_us throughput_mbps\n";
  for (const SizeRecord& r : result.records) {
    out << r.mode << ' ' << r.size_bytes << ' ' << r.n << ' '
        << fmt_double(r.mean_us) << ' ' << fmt_double(r.median_us) << ' '
        << fmt_double(r.p99_us) << ' ' << fmt_double(r.throughput_mbps)
        << "\n";
  }
}

namespace {

std::uint64_t parse_one_size(const std::string& text) {
  if (text.empty()) throw std::runtime_error("empty size");
  std::uint64_t multiplier = 1;
  std::string digits = text;
  switch (text.back()) {
    case 'B': case 'b': digits.pop_back(); break;
    case 'K': case 'k': multiplier = 1024ull; digits.pop_back(); break;
    case 'M': case 'm': multiplier = 1024ull * 1024; digits.pop_back(); break;
    case 'G': case 'g': multiplier = 1024ull * 1024 * 1024; digits.pop_back(); break;
    default: break;
  }
  std::size_t used = 0;
  std::uint64_t value = std::stoull(digits, &used);
  if (used != digits.size()) {
    throw std::runtime_error("bad size '" + text + "'");
  }
  if (value == 0) throw std::runtime_error("sizes must be >= 1 byte");
  return value * multiplier;
}

}  // namespace

std::vector<std::uint64_t> parse_sizes(const std::string& spec) {
  std::vector<std::uint64_t> sizes;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto range = item.find("..");
    if (range == std::string::npos) {
      sizes.push_back(parse_one_size(item));
      continue;
    }
    std::uint64_t from = parse_one_size(item.substr(0, range));
    std::uint64_t to = parse_one_size(item.substr(range + 2));
    if (from > to) throw std::runtime_error("descending range '" + item + "'");
    for (std::uint64_t s = from; s < to; s *= 2) sizes.push_back(s);
    sizes.push_back(to);
  }
  if (sizes.empty()) throw std::runtime_error("no sizes given");
  return sizes;
}

std::string format_size(std::uint64_t bytes) {
  char buf[32];
  if (bytes % (1024ull * 1024 * 1024) == 0 && bytes > 0) {
    std::snprintf(buf, sizeof(buf), "%lluG",
                  static_cast<unsigned long long>(bytes >> 30));
  } else if (bytes % (1024ull * 1024) == 0 && bytes > 0) {
    std::snprintf(buf, sizeof(buf), "%lluM",
                  static_cast<unsigned long long>(bytes >> 20));
  } else if (bytes % 1024 == 0 && bytes > 0) {
    std::snprintf(buf, sizeof(buf), "%lluK",
                  static_cast<unsigned long long>(bytes >> 10));
  } else {
    std::snprintf(buf, sizeof(buf), "%lluB",
                  static_cast<unsigned long long>(bytes));
  }
  return buf;
}

}  // namespace bench
