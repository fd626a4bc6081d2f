#include "graphbus/buffer.hpp"

#include <cstring>

namespace graphbus {

ByteBuffer::ByteBuffer(Bytes bytes) : rc_(1), bytes_(std::move(bytes)) {}

ByteBuffer* ByteBuffer::create(Bytes bytes) {
  return new ByteBuffer(std::move(bytes));
}

ByteBuffer* ByteBuffer::create(std::span<const std::byte> bytes) {
  return new ByteBuffer(Bytes(bytes.begin(), bytes.end()));
}

ByteBuffer* ByteBuffer::create(std::string_view text) {
  Bytes b(text.size());
  if (!text.empty()) std::memcpy(b.data(), text.data(), text.size());
  return new ByteBuffer(std::move(b));
}

void ByteBuffer::unref() const noexcept {
  if (rc_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
    delete this;
  }
}

std::shared_ptr<const ByteBuffer> ByteBuffer::share(const ByteBuffer* buffer) {
  buffer->ref();
  return std::shared_ptr<const ByteBuffer>(
      buffer, [](const ByteBuffer* p) { p->unref(); });
}

std::shared_ptr<const ByteBuffer> ByteBuffer::make_shared(Bytes bytes) {
  ByteBuffer* raw = create(std::move(bytes));
  std::shared_ptr<const ByteBuffer> sp(
      raw, [](const ByteBuffer* p) { p->unref(); });
  return sp;
}

std::shared_ptr<const ByteBuffer> ByteBuffer::make_shared(
    std::span<const std::byte> bytes) {
  return make_shared(Bytes(bytes.begin(), bytes.end()));
}

}  // namespace graphbus
