#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace graphbus {

using Bytes = std::vector<std::byte>;

/// Immutable reference-counted byte payload. The intrusive count lets the
/// C API hold references without owning a shared_ptr; inside the library the
/// same object travels as shared_ptr<const ByteBuffer> via share().
class ByteBuffer {
 public:
  ByteBuffer(const ByteBuffer&) = delete;
  ByteBuffer& operator=(const ByteBuffer&) = delete;

  /// New buffer with one reference.
  static ByteBuffer* create(Bytes bytes);
  static ByteBuffer* create(std::span<const std::byte> bytes);
  static ByteBuffer* create(std::string_view text);

  void ref() const noexcept { rc_.fetch_add(1, std::memory_order_relaxed); }
  void unref() const noexcept;

  std::span<const std::byte> view() const noexcept { return bytes_; }
  const Bytes& bytes() const noexcept { return bytes_; }
  std::size_t size() const noexcept { return bytes_.size(); }
  const std::byte* data() const noexcept { return bytes_.data(); }

  /// shared_ptr sharing ownership with the intrusive count (takes one ref,
  /// releases it when the last copy dies).
  static std::shared_ptr<const ByteBuffer> share(const ByteBuffer* buffer);

  /// create() + share() without the intermediate raw reference.
  static std::shared_ptr<const ByteBuffer> make_shared(Bytes bytes);
  static std::shared_ptr<const ByteBuffer> make_shared(
      std::span<const std::byte> bytes);

 private:
  explicit ByteBuffer(Bytes bytes);
  ~ByteBuffer() = default;

  mutable std::atomic<std::uint64_t> rc_;
  Bytes bytes_;
};

}  // namespace graphbus
